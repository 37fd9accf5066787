use mtkcs::choquard::{build_riesz, build_riesz_cached, riesz_form, RieszOperator};
use mtkcs::radial::RadialGrid;

#[test]
fn cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let grid = RadialGrid::new(1.0, 48, 1.05).unwrap();
    let built = build_riesz_cached(1.0, 2, &grid, 12, dir.path()).unwrap();
    let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(files.len(), 1);
    let loaded = build_riesz_cached(1.0, 2, &grid, 12, dir.path()).unwrap();
    let f: Vec<f64> = grid.nodes().iter().map(|r| 1.0 - r * r).collect();
    assert_eq!(riesz_form(&built, &f, &f).unwrap(), riesz_form(&loaded, &f, &f).unwrap());
    for i in 0..grid.len() {
        for j in 0..grid.len() {
            assert_eq!(built.entry(i, j).to_bits(), loaded.entry(i, j).to_bits());
        }
    }
}

#[test]
fn cache_rejects_other_keys() {
    let dir = tempfile::tempdir().unwrap();
    let grid = RadialGrid::new(1.0, 32, 1.05).unwrap();
    let path = dir.path().join("op.bin");
    build_riesz(1.0, 2, &grid, 12).unwrap().save(&path).unwrap();
    assert!(RieszOperator::load(&path, 1.0, 2, &grid, 12).unwrap().is_some());
    assert!(RieszOperator::load(&path, 1.5, 2, &grid, 12).unwrap().is_none());
    let other = RadialGrid::new(1.0, 32, 1.04).unwrap();
    assert!(RieszOperator::load(&path, 1.0, 2, &other, 12).unwrap().is_none());

    let bytes = std::fs::read(&path).unwrap();
    std::fs::write(&path, &bytes[..bytes.len() - 8]).unwrap();
    assert!(RieszOperator::load(&path, 1.0, 2, &grid, 12).is_err());
    std::fs::write(&path, b"not a cache").unwrap();
    assert!(RieszOperator::load(&path, 1.0, 2, &grid, 12).is_err());
}
