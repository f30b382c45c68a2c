use floquet::dispersion::{BranchKind, SpectralBranch};
use floquet::report::{branches_from_csv, branches_to_csv, JsonReport};
use num_complex::Complex64;
use proptest::prelude::*;

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![-1e6..1e6f64, -1e-6..1e-6f64, Just(0.0), Just(-0.0), Just(f64::MIN_POSITIVE)]
}

fn branch() -> impl Strategy<Value = SpectralBranch> {
    (
        0usize..6,
        prop_oneof![Just(BranchKind::Limiting), (1e-6..0.5f64).prop_map(BranchKind::Perturbed)],
        prop::collection::vec((finite(), finite(), finite()), 0..12),
        prop::collection::vec(finite(), 0..3),
    )
        .prop_map(|(id, kind, pts, mut gaps)| {
            // branches are stored in increasing mu, gaps at mu values without a sample
            let mut samples: Vec<(f64, Complex64)> = pts.into_iter().map(|(mu, re, im)| (mu, Complex64::new(re, im))).collect();
            samples.sort_by(|a, b| a.0.total_cmp(&b.0));
            samples.dedup_by(|a, b| a.0 == b.0);
            gaps.sort_by(f64::total_cmp);
            gaps.dedup_by(|a, b| a == b);
            gaps.retain(|g| samples.iter().all(|s| s.0 != *g));
            SpectralBranch { branch_id: id, kind, samples, gaps }
        })
}

proptest! {
    #[test]
    fn csv_round_trip_is_exact(mut branches in prop::collection::vec(branch(), 0..4)) {
        // ids must be distinct per kind for the grouping to be unambiguous
        for (i, b) in branches.iter_mut().enumerate() {
            b.branch_id = i;
        }
        let text = branches_to_csv(&branches).unwrap();
        let back = branches_from_csv(&text).unwrap();
        let nonempty: Vec<&SpectralBranch> =
            branches.iter().filter(|b| !b.samples.is_empty() || !b.gaps.is_empty()).collect();
        prop_assert_eq!(back.len(), nonempty.len());
        for (a, b) in nonempty.iter().zip(&back) {
            prop_assert_eq!(a.branch_id, b.branch_id);
            prop_assert_eq!(a.kind, b.kind);
            prop_assert_eq!(a.samples.len(), b.samples.len());
            for (x, y) in a.samples.iter().zip(&b.samples) {
                prop_assert_eq!(x.0.to_bits(), y.0.to_bits());
                prop_assert_eq!(x.1.re.to_bits(), y.1.re.to_bits());
                prop_assert_eq!(x.1.im.to_bits(), y.1.im.to_bits());
            }
            prop_assert_eq!(&a.gaps, &b.gaps);
        }
    }
}

#[test]
fn report_json_is_stable() {
    let params = vec![("p1".to_string(), 0.5), ("delta".to_string(), 0.05)];
    let a = JsonReport::new("verdict", "gle", &params).to_json();
    let b = JsonReport::new("verdict", "gle", &params).to_json();
    assert_eq!(a, b);
    assert!(a.ends_with('\n'));
}
