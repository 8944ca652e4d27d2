use super::*;
use crate::graph::{generate_regular, TruncatedTree};

fn k4() -> RegularGraph {
    RegularGraph::from_edges(4, 3, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
}

fn zi() -> SpectralParam {
    SpectralParam::new(0.0, 1.0).unwrap()
}

#[test]
fn k4_spectrum() {
    let sd = spectral_decompose(&k4(), 3).unwrap();
    let s = 2f64.sqrt();
    let ev = sd.eigenvalues();
    assert!((ev[0] - 3.0 / s).abs() < 1e-12);
    for &x in &ev[1..] {
        assert!((x + 1.0 / s).abs() < 1e-12);
    }
    let v0 = sd.vector(0);
    assert!(v0.iter().all(|&x| (x.abs() - 0.5).abs() < 1e-12));
    assert!(sd.reconstruction_error(&k4(), 3) < 1e-12);
    let ev2 = eigenvalues(&k4(), 3).unwrap();
    assert!(ev.iter().zip(&ev2).all(|(a, b)| (a - b).abs() < 1e-12));
}

#[test]
fn k4_resolvent() {
    let gm = green_full(&k4(), zi()).unwrap();
    let s = 2f64.sqrt();
    let i = C64::new(0.0, 1.0);
    let expected = (1.0 / (3.0 / s - i) + 3.0 / (-1.0 / s - i)) / 4.0;
    assert!((gm.m_n() - expected).norm() < 1e-12);
    let direct = green_direct(&k4(), 3, zi()).unwrap();
    for a in 0..4 {
        let row: C64 = gm.row(a).iter().sum();
        assert!((row - 1.0 / (3.0 / s - i)).norm() < 1e-12);
        assert!(gm.get(a, a).im > 0.0);
        for b in 0..4 {
            assert!((gm.get(a, b) - direct.get(a, b)).norm() < 1e-12);
        }
    }
    assert!(gm.ward_residual() < 1e-12);
    assert!(gm.symmetry_residual() < 1e-14);
    assert!(gm.inverse_residual(&shifted_hamiltonian(&k4(), 3, i, &[])) < 1e-12);
}

#[test]
fn minors() {
    let g = k4();
    let gm = green_full(&g, zi()).unwrap();
    // removing one vertex leaves a triangle, inverted directly
    let tri = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
    let direct = green_direct(&tri, 3, zi()).unwrap();
    let minor = green_minor(&g, 3, zi(), &[3]).unwrap();
    let schur = schur_single(&gm, 3).unwrap();
    assert_eq!(minor.kept, vec![0, 1, 2]);
    for a in 0..3 {
        for b in 0..3 {
            assert!((minor.green.get(a, b) - direct.get(a, b)).norm() < 1e-12);
            assert!((schur.get(a, b) - direct.get(a, b)).norm() < 1e-12);
        }
    }
    let same = green_minor(&g, 3, zi(), &[]).unwrap();
    assert!((0..16).all(|k| (same.green.get(k / 4, k % 4) - gm.get(k / 4, k % 4)).norm() < 1e-12));
    // two removals go through the induced graph
    let two = green_minor(&g, 3, zi(), &[0, 2]).unwrap();
    assert_eq!(two.kept, vec![1, 3]);
    let once = schur_single(&schur_single(&gm, 2).unwrap(), 0).unwrap();
    assert!((two.green.get(0, 1) - once.get(0, 1)).norm() < 1e-12);
    assert!(green_minor(&g, 3, zi(), &[0, 1, 2, 3]).is_err());
}

#[test]
fn q_matches_brute_force_minors() {
    let g = k4();
    let gm = green_full(&g, zi()).unwrap();
    let q = q_of_g(&g, &gm).unwrap();
    let mut brute = C64::new(0.0, 0.0);
    for i in 0..4 {
        for &j in g.neighbors(i) {
            let keep: Vec<usize> = (0..4).filter(|&v| v != j).collect();
            let sub = Graph::induced(&g, &keep);
            let inv = green_direct(&sub, 3, zi()).unwrap();
            let li = keep.iter().position(|&v| v == i).unwrap();
            brute += inv.get(li, li);
        }
    }
    brute /= 12.0;
    assert!((q - brute).norm() < 1e-12);
    let sd = spectral_decompose(&g, 3).unwrap();
    assert!((q_spectral(&g, &sd, zi()).unwrap() - q).norm() < 1e-12);
}

#[test]
fn q_is_relabeling_invariant() {
    let g = generate_regular(30, 3, 4).unwrap();
    let perm: Vec<usize> = (0..30).map(|v| (7 * v + 3) % 30).collect();
    let h = g.relabel(&perm).unwrap();
    let z = SpectralParam::new(0.3, 0.2).unwrap();
    let a = q_of_g(&g, &green_full(&g, z).unwrap()).unwrap();
    let b = q_of_g(&h, &green_full(&h, z).unwrap()).unwrap();
    assert!((a - b).norm() < 1e-12);
}

#[test]
fn closed_tree_special_cases() {
    for &(e, eta) in &[(0.0, 1.0), (1.9, 0.01), (-3.0, 0.5)] {
        let z = C64::new(e, eta);
        for d in 3..6 {
            assert!((green_closed_tree(0, 0, z, d, TreeKind::Regular) - m_d(z, d)).norm() < 1e-14);
            assert!((green_closed_tree(0, 0, z, d, TreeKind::Ary) - m_sc(z)).norm() < 1e-12);
        }
    }
}

#[test]
fn truncated_tree_extension_is_exact() {
    let z = SpectralParam::new(0.4, 0.3).unwrap();
    let t = TruncatedTree::new(TreeKind::Regular, 3, 3).unwrap();
    let gm = green_ext(&WeightedExtension::new(t.graph().clone(), m_sc(z), z)).unwrap();
    for j in 0..t.len() {
        let want = green_closed_tree(t.dist(5, j), 0, z, 3, TreeKind::Regular);
        assert!((gm.get(5, j) - want).norm() < 1e-12);
    }
}

#[test]
fn eigenvalue_dump_round_trip() {
    let values = vec![2.5, -1.0, 0.125, f64::MIN_POSITIVE];
    let mut buf = Vec::new();
    write_eigenvalues_bin(&mut buf, &values).unwrap();
    assert_eq!(buf.len(), 8 + 32);
    assert_eq!(&buf[..8], &4u64.to_le_bytes());
    assert_eq!(read_eigenvalues_bin(&buf[..]).unwrap(), values);
    assert!(read_eigenvalues_bin(&buf[..20]).is_err());
}

#[test]
fn degenerate_pivot_is_numeric() {
    let gm = GreenMatrix::from_entries(zi(), 2, vec![C64::new(0.0, 0.0); 4]);
    let err = schur_single(&gm, 0).unwrap_err();
    assert!(err.is_numeric());
}
