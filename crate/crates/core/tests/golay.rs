use crosstheta::catalog;
use crosstheta::code::LinearCode;
use crosstheta::theta::theta_l1_construction_a;

#[test]
fn quaternary_golay_from_generators() {
    let code = LinearCode::quaternary_golay();
    assert_eq!(code.size(), 1 << 24);
    let swe = code.swe(1 << 24).unwrap();
    assert_eq!(swe, catalog::quaternary_golay_swe());
    let theta = theta_l1_construction_a(&code).unwrap().to_series(12);
    let c = theta.integer_coefficients().unwrap();
    assert_eq!((c[4].clone(), c[8].clone(), c[12].clone()), (48.into(), 1152.into(), 67024.into()));
}
