use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use proptest::prelude::*;

use curs::manifold::{cut_function, distance, exp_map, log_volume_density, sample_direction};
use curs::numkern::{
    eig_hermitian, expm_hermitian, log_sinh_ratio, logm_spd, pfaffian, sinc, sinch,
    HermitianMatrix, Matrix, SkewSymmetricMatrix,
};
use curs::rng::stream;
use curs::theory::TheoryConstants;
use curs::{
    AcceptanceStats, Beta, GeometrySpec, Point, RadialLaw, RadialProposal, RadialSampler, Shape,
};

fn hermitian(n: usize, complex: bool, entries: &[f64]) -> HermitianMatrix {
    let t = Matrix::from_fn(n, |i, j| {
        let k = 2 * (i * n + j);
        Complex64::new(entries[k], if complex { entries[k + 1] } else { 0.0 })
    });
    HermitianMatrix::hermitian_part(&(&t + &t.adjoint()).scale(0.5))
}

fn hermitian_strategy(max_n: usize, bound: f64) -> impl Strategy<Value = HermitianMatrix> {
    (1..=max_n, any::<bool>()).prop_flat_map(move |(n, complex)| {
        prop::collection::vec(-bound..bound, 2 * n * n).prop_map(move |e| hermitian(n, complex, &e))
    })
}

/// Determinant by Gaussian elimination with partial pivoting.
fn det(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut d = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= a[c][c];
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
        }
    }
    d
}

fn spd_geometries() -> impl Strategy<Value = GeometrySpec> {
    (2usize..=5, prop::sample::select(vec![Beta::Real, Beta::Complex]))
        .prop_map(|(n, b)| GeometrySpec::spd(n, b).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eig_reconstructs(m in hermitian_strategy(8, 3.0)) {
        let e = eig_hermitian(&m).unwrap();
        let scale = m.matrix().max_abs().max(1.0);
        prop_assert!(e.reconstruct().max_abs_diff(m.matrix()) <= 1e-10 * scale);
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        let vv = &e.vectors.adjoint() * &e.vectors;
        prop_assert!(vv.max_abs_diff(&Matrix::identity(m.n())) < 1e-10);
    }

    #[test]
    fn expm_maps_eigenvalues(m in hermitian_strategy(6, 1.0)) {
        let want: Vec<f64> = eig_hermitian(&m).unwrap().values.iter().map(|l| l.exp()).collect();
        let got = eig_hermitian(&expm_hermitian(&m).unwrap()).unwrap().values;
        for (a, b) in got.iter().zip(&want) {
            prop_assert!((a - b).abs() <= 1e-10 * b.max(1.0));
        }
    }

    #[test]
    fn logm_inverts_expm(m in hermitian_strategy(6, 1.0)) {
        // Frobenius norm at most 5.
        let norm = m.matrix().frobenius_norm();
        let m = if norm > 5.0 { m.scale(5.0 / norm) } else { m };
        let back = logm_spd(&expm_hermitian(&m).unwrap()).unwrap();
        prop_assert!(back.matrix().max_abs_diff(m.matrix()) < 1e-9);
    }

    #[test]
    fn pfaffian_squares_to_determinant(
        half in 1usize..=6,
        entries in prop::collection::vec(-2.0f64..2.0, 144),
    ) {
        let n = 2 * half;
        let a = SkewSymmetricMatrix::from_upper(n, |i, j| entries[i * 12 + j]);
        let pf = pfaffian(&a).unwrap();
        let rows: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| a.get(i, j)).collect()).collect();
        let d = det(rows);
        prop_assert!((pf * pf - d).abs() <= 1e-8 * d.abs().max(1e-300), "{pf}² vs {d}");
    }

    #[test]
    fn sinch_and_sinc_are_smooth_at_switchover(eps in 1e-12f64..1e-9, sign in prop::bool::ANY) {
        let s = if sign { 1.0 } else { -1.0 };
        for x in [s * (1e-4 - eps), s * (1e-4 + eps)] {
            let x2 = x * x;
            let tail = x2 * x2 * x2 / 5040.0;
            prop_assert!((sinch(x) - (1.0 + x2 / 6.0 + x2 * x2 / 120.0 + tail)).abs() < 1e-14);
            prop_assert!((sinc(x) - (1.0 - x2 / 6.0 + x2 * x2 / 120.0 - tail)).abs() < 1e-14);
        }
    }

    #[test]
    fn volume_bounds(geom in spd_geometries(), seed in any::<u64>(), r in 1e-6f64..20.0) {
        let dir = sample_direction(&geom, &mut stream(seed, 0)).unwrap();
        let lv = log_volume_density(&geom, r, &dir).unwrap();
        let d1 = (geom.dim() - 1) as f64;
        let upper = d1 * log_sinh_ratio(FRAC_1_SQRT_2, r);
        let tol = 1e-12 * upper.abs().max(1.0);
        prop_assert!(lv <= upper + tol);
        prop_assert!(lv >= d1 * r.ln() - tol);
        prop_assert!(dir.max_kappa() <= FRAC_1_SQRT_2 + 1e-12);
        let norm: f64 = dir.sigma().iter().map(|s| s * s).sum();
        prop_assert!((norm - 1.0).abs() < 1e-10);
    }

    #[test]
    fn unitary_flat_bound_and_round_trip(n in 2usize..=3, seed in any::<u64>(), t in 0.01f64..0.99) {
        let geom = GeometrySpec::unitary(n).unwrap();
        let dir = sample_direction(&geom, &mut stream(seed, 0)).unwrap();
        let c = cut_function(&geom, &dir);
        prop_assert!(c <= geom.diameter() + 1e-9);
        let r = t * c;
        let lv = log_volume_density(&geom, r, &dir).unwrap();
        prop_assert!(lv <= (geom.dim() - 1) as f64 * r.ln() + 1e-12);
        let base = Point::identity(n);
        let x = exp_map(&geom, r, &dir, &base).unwrap();
        prop_assert!(x.matrix().unitarity_defect() < 1e-10);
        prop_assert!((distance(&geom, &base, &x).unwrap() - r).abs() < 1e-8);
    }

    #[test]
    fn spd_round_trip(geom in spd_geometries(), seed in any::<u64>(), r in 0.0f64..3.0) {
        let dir = sample_direction(&geom, &mut stream(seed, 0)).unwrap();
        let base = Point::identity(geom.rank());
        let x = exp_map(&geom, r, &dir, &base).unwrap();
        prop_assert!((distance(&geom, &base, &x).unwrap() - r).abs() < 1e-8);
    }

    #[test]
    fn merge_is_order_independent(
        parts in prop::collection::vec((0u64..1000, 0u64..1000), 1..8),
    ) {
        let stats: Vec<AcceptanceStats> = parts
            .iter()
            .map(|&(a, b)| AcceptanceStats { trials: a.max(b), accepts: a.min(b) })
            .collect();
        let forward = stats.iter().fold(AcceptanceStats::default(), |acc, s| acc.merge(*s));
        let backward = stats.iter().rev().fold(AcceptanceStats::default(), |acc, s| acc.merge(*s));
        prop_assert_eq!(forward, backward);
        prop_assert!(forward.accepts <= forward.trials);
        prop_assert!((0.0..=1.0).contains(&forward.pi_hat()));
    }

    #[test]
    fn log_g_stays_finite(d in 2usize..=200, r in 1e-3f64..500.0, sigma in 0.05f64..5.0) {
        let p = RadialProposal::new(
            RadialLaw::gaussian(sigma).unwrap(),
            Shape::Hyperbolic { pairs: vec![(FRAC_1_SQRT_2, (d - 1) as f64)] },
        ).unwrap();
        let v = p.log_g(r).unwrap();
        prop_assert!(v.is_finite());
    }

    #[test]
    fn sampler_streams_are_reproducible(seed in any::<u64>(), sigma in 0.1f64..1.5) {
        let geom = GeometrySpec::spd(3, Beta::Real).unwrap();
        let p = RadialProposal::general(&geom, RadialLaw::gaussian(sigma).unwrap());
        let s = RadialSampler::new(&p).unwrap();
        let (mut a, mut b) = (stream(seed, 0), stream(seed, 0));
        for _ in 0..20 {
            prop_assert_eq!(s.sample(&mut a).to_bits(), s.sample(&mut b).to_bits());
        }
    }

    #[test]
    fn acceptance_probability_in_unit_interval(half in 1usize..=2, sigma in 0.1f64..1.5) {
        let t = TheoryConstants::closed_form(2 * half, sigma).unwrap();
        prop_assert!(t.pi > 0.0 && t.pi <= 1.0);
        let sharp = t.pi_sharp.unwrap();
        prop_assert!(sharp >= t.pi && sharp <= 1.0 + 1e-12);
    }
}
