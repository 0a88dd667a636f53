use ab_polya::enclosures::Precision;
use ab_polya::gapcert::{
    float_cross_check, parse_table, recheck_chain, replay_chain, run_chain, table1, validate_table,
    RowCheck, TABLE1_CSV,
};
use ab_polya::rational::{int, rat};

#[test]
fn replay_reproduces_published_rows() {
    let rows = table1();
    let starts: Vec<_> = rows.iter().map(|r| r.lambda.clone()).collect();
    let chain = replay_chain(&starts, &int(9), &Precision::default()).unwrap();
    assert_eq!(chain.steps.len(), 14);
    assert_eq!(chain.end, rat(374, 39));
    for (step, row) in chain.steps.iter().zip(&rows) {
        assert_eq!(Some(&step.e_low), row.e_low.as_ref());
        assert_eq!(Some(&step.d_low), row.d_low.as_ref());
    }
    recheck_chain(&chain).unwrap();
}

#[test]
fn free_chain_closes_and_rechecks() {
    let chain = run_chain(&rat(5, 2), &int(9), &Precision::default()).unwrap();
    assert!(chain.steps.len() <= 30);
    assert!(chain.end > int(9));
    recheck_chain(&chain).unwrap();
    assert!(float_cross_check(&chain));
}

#[test]
fn tampered_chain_is_rejected() {
    let mut chain = run_chain(&rat(5, 2), &int(4), &Precision::default()).unwrap();
    chain.steps[1].d_low = &chain.steps[1].d_low * int(2);
    assert!(recheck_chain(&chain).is_err());
}

#[test]
fn spot_rows() {
    let r = validate_table(&table1(), &Precision::default());
    assert!(r.passed());
    assert_eq!(r.rows[0].q, Some(2));
    assert_eq!(r.rows[3].q, Some(5));
    assert_eq!(r.rows[11].q, Some(18));
    // (246/29)^2 = 60516/841 <= 72
    assert!(rat(60516, 841) <= int(72));
}

#[test]
fn broken_fixtures() {
    let changed = TABLE1_CSV.replace("4,4,1,8/17", "4,4,2,8/17");
    let report = validate_table(&parse_table(&changed).unwrap(), &Precision::default());
    let bad = report.first_failure().unwrap();
    assert_eq!((bad.step, bad.failed), (4, Some(RowCheck::Margin)));

    let too_long = TABLE1_CSV.replace("1,5/2,7/16,15/46", "1,5/2,7/16,16/46");
    let report = validate_table(&parse_table(&too_long).unwrap(), &Precision::default());
    assert_eq!(report.first_failure().unwrap().failed, Some(RowCheck::Step));

    let gap = TABLE1_CSV.replace("2,65/23", "2,66/23");
    let report = validate_table(&parse_table(&gap).unwrap(), &Precision::default());
    assert_eq!(report.first_failure().unwrap().failed, Some(RowCheck::Chaining));

    assert!(parse_table("step,lambda,e_low,d_low\n1,x,1,1\n").is_err());
}
