//! Property tests for the structural invariants of the generator algebra,
//! the classical ladder, and the mode-file round trip.

use ndarray::Array2;
use proptest::prelude::*;

use darkcool_core::modes::{parse_modes, synth_modes, ModeSpectrum, SynthKind};
use darkcool_core::qops::{dense_adjoint, CsMat, HilbertSpace, Liouvillian, QOperator};
use darkcool_core::strong::{ladder_steady_closed, ladder_steady_null, RateLadder};
use darkcool_core::{C64, TWO_PI};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// A random Hermitian matrix from a flat coefficient list.
fn hermitian_from(coeffs: &[f64], n: usize) -> CsMat {
    let mut trips = Vec::new();
    let mut k = 0;
    for i in 0..n {
        for j in i..n {
            let re = coeffs[k % coeffs.len()];
            let im = coeffs[(k + 1) % coeffs.len()];
            k += 2;
            if i == j {
                trips.push((i, j, c(re, 0.0)));
            } else {
                trips.push((i, j, c(re, im)));
                trips.push((j, i, c(re, -im)));
            }
        }
    }
    CsMat::from_triplets(n, &trips)
}

fn general_from(coeffs: &[f64], n: usize, offset: usize) -> CsMat {
    let mut trips = Vec::new();
    let mut k = offset;
    for i in 0..n {
        for j in 0..n {
            let re = coeffs[k % coeffs.len()];
            let im = coeffs[(k + 7) % coeffs.len()];
            k += 3;
            trips.push((i, j, c(re, im)));
        }
    }
    CsMat::from_triplets(n, &trips)
}

/// Random density matrix: Hermitian, positive, unit trace.
fn density_from(coeffs: &[f64], n: usize) -> Array2<C64> {
    // ρ = G†G / Tr(G†G)
    let g = general_from(coeffs, n, 1);
    let gg = g.dagger().matmul(&g);
    let mut rho = gg.to_dense();
    // ensure strict positivity of the trace
    for i in 0..n {
        rho[(i, i)] += c(1e-3, 0.0);
    }
    let tr: C64 = (0..n).map(|i| rho[(i, i)]).sum();
    rho.mapv_inplace(|x| x / tr);
    rho
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    /// Trace conservation and Hermiticity preservation of the generator.
    #[test]
    fn liouvillian_conserves_trace_and_hermiticity(
        coeffs in prop::collection::vec(-2.0f64..2.0, 24..48),
        dim in 2usize..6,
        n_jumps in 0usize..3,
    ) {
        let space = HilbertSpace::single("x", dim);
        let h = QOperator::new(space.clone(), hermitian_from(&coeffs, dim)).unwrap();
        let jumps: Vec<QOperator> = (0..n_jumps)
            .map(|k| QOperator::new(space.clone(), general_from(&coeffs, dim, 5 + 11 * k)).unwrap())
            .collect();
        let liouv = Liouvillian::new(&h, &jumps).unwrap();
        let rho = density_from(&coeffs, dim);
        let d = liouv.apply(&rho).unwrap();

        let tr: C64 = (0..dim).map(|i| d[(i, i)]).sum();
        let scale = d.iter().map(|x| x.norm()).fold(1.0, f64::max);
        prop_assert!(tr.norm() < 1e-10 * scale, "trace leak {}", tr.norm());

        let adj = dense_adjoint(&d);
        let herm = d.iter().zip(adj.iter()).map(|(a, b)| (*a - *b).norm()).fold(0.0, f64::max);
        prop_assert!(herm < 1e-12 * scale.max(1.0), "hermiticity defect {herm}");
    }

    /// Assembled superoperator and matrix-free application agree elementwise.
    #[test]
    fn assembled_equals_matrix_free(
        coeffs in prop::collection::vec(-1.5f64..1.5, 24..40),
        dim in 2usize..5,
    ) {
        let space = HilbertSpace::single("x", dim);
        let h = QOperator::new(space.clone(), hermitian_from(&coeffs, dim)).unwrap();
        let jump = QOperator::new(space.clone(), general_from(&coeffs, dim, 3)).unwrap();
        let free = Liouvillian::new(&h, std::slice::from_ref(&jump)).unwrap();
        let asm = Liouvillian::new(&h, &[jump]).unwrap().with_assembled().unwrap();
        let rho = density_from(&coeffs, dim);
        let d1 = free.apply(&rho).unwrap();
        let d2 = asm.apply(&rho).unwrap();
        let scale = d1.iter().map(|x| x.norm()).fold(1.0, f64::max);
        let dev = d1.iter().zip(d2.iter()).map(|(a, b)| (*a - *b).norm()).fold(0.0, f64::max);
        prop_assert!(dev < 1e-12 * scale, "deviation {dev}");
    }

    /// Ladder steady state from the direct solve equals the closed form for
    /// random positive rates.
    #[test]
    fn ladder_steady_matches_closed_form(
        rates in prop::collection::vec(1e-3f64..10.0, 4..12),
        g1p in 1e-6f64..1.0,
        g2p in 1e-6f64..1.0,
    ) {
        let ladder = RateLadder::from_rates(1, rates, g1p, g2p).unwrap();
        // columns conserve probability
        let dim = ladder.n_max + 1;
        for j in 0..dim {
            let s: f64 = (0..dim).map(|i| ladder.m[i][j]).sum();
            prop_assert!(s.abs() < 1e-12);
        }
        let closed = ladder_steady_closed(&ladder);
        let null = ladder_steady_null(&ladder).unwrap();
        for (a, b) in closed.iter().zip(&null) {
            prop_assert!((a - b).abs() < 1e-12, "closed {a} vs null {b}");
        }
    }

    /// Mode files round-trip bit-identically, with and without profiles.
    #[test]
    fn mode_file_round_trip(
        freqs in prop::collection::vec(0.01f64..10.0, 1..12),
    ) {
        // descending order keeps the COM convention warning-free
        let mut fs = freqs.clone();
        fs.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let spec = ModeSpectrum::new(fs, None).unwrap();
        let text = spec.to_text();
        let back = parse_modes(&text).unwrap();
        prop_assert_eq!(&spec, &back);
        prop_assert_eq!(text, back.to_text());
    }

    /// Synthetic spectra always validate and round-trip.
    #[test]
    fn synth_spectra_round_trip(n in 1usize..9, bw_frac in 0.0f64..0.9) {
        let omega_m = TWO_PI * 1.59;
        for kind in [SynthKind::ComOnly, SynthKind::Degenerate, SynthKind::UniformBand(bw_frac * omega_m)] {
            let spec = synth_modes(kind, n, omega_m).unwrap();
            let back = parse_modes(&spec.to_text()).unwrap();
            prop_assert_eq!(spec, back);
        }
    }
}
