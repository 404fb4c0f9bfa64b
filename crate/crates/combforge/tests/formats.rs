use combforge::io::{decode_lop, read_comb, read_operator, write_comb, write_operator, FileFormat};
use combforge_core::comb::random_comb;
use combforge_core::haarmoment::haar_moment_weingarten;
use combforge_core::stair::StairOperator;
use combforge_core::Budget;

#[test]
fn operators_round_trip_through_both_formats() {
    let dir = tempfile::tempdir().unwrap();
    let m = haar_moment_weingarten(2, 2).unwrap();
    for name in ["m.lop", "m.json"] {
        let p = dir.path().join(name);
        write_operator(&p, &m, FileFormat::from_path(&p)).unwrap();
        assert_eq!(read_operator(&p).unwrap(), m);
    }
}

#[test]
fn stair_operators_are_exportable() {
    let dir = tempfile::tempdir().unwrap();
    let a = StairOperator::new(2, 2, 1, Budget::default()).unwrap().padded().unwrap();
    let p = dir.path().join("a.lop");
    write_operator(&p, &a, FileFormat::Lop).unwrap();
    let bytes = std::fs::read(&p).unwrap();
    assert_eq!(&bytes[..4], b"LOP1");
    assert_eq!(decode_lop(&bytes).unwrap(), a);
}

#[test]
fn combs_keep_teeth_and_validity() {
    let dir = tempfile::tempdir().unwrap();
    let c = random_comb(2, 2, 3, 11).unwrap();
    for name in ["c.lop", "c.json"] {
        let p = dir.path().join(name);
        write_comb(&p, &c, FileFormat::from_path(&p)).unwrap();
        let (back, bytes) = read_comb(&p).unwrap();
        assert_eq!(back.teeth(), c.teeth());
        assert_eq!(back.op(), c.op());
        assert!(back.is_valid(1e-9));
        assert!(!bytes.is_empty());
    }
}

#[test]
fn truncated_files_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("m.lop");
    write_operator(&p, &haar_moment_weingarten(2, 1).unwrap(), FileFormat::Lop).unwrap();
    let bytes = std::fs::read(&p).unwrap();
    std::fs::write(&p, &bytes[..bytes.len() - 3]).unwrap();
    assert!(read_operator(&p).is_err());
    std::fs::write(&p, b"{\"labels\": []").unwrap();
    assert!(read_operator(&p).is_err());
}
