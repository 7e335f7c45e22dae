mod common;

use blocksparse::analysis::{
    block_recovery_threshold, conventional_threshold, max_recoverable_k, verify_uncertainty,
    welch_coherence_bound,
};
use blocksparse::coherence::{block_coherence, coherence, exact_recovery_certificate, sub_coherence};
use blocksparse::dictionaries::{
    dirac_comb_signal, gaussian_dictionary, orthogonalize_blocks, random_unitary, spike_kron_fourier,
};
use blocksparse::recovery::{bmp, bomp, lopt, omp, LoptParams};
use blocksparse::{BlockDictionary, BlockSupport, BlockVector, CMat, CVec, Complex64};
use common::*;
use rand::seq::index::sample;

fn sparse_signal(g: &mut rand_chacha::ChaCha8Rng, n: usize, d: usize, k: usize, complex: bool) -> BlockVector {
    let mut idx = sample(g, n / d, k).into_vec();
    idx.sort_unstable();
    let mut x = BlockVector::zeros(n, d).unwrap();
    for l in idx {
        let v = random_vector(g, d, complex);
        x.block_mut(l).copy_from_slice(v.as_slice());
    }
    x
}

#[test]
fn bmp_correlation_lower_bound() {
    let mut g = rng(11);
    let mut checked = 0;
    for seed in 0..60 {
        let dict = orthogonalize_blocks(&gaussian_dictionary(48, 96, 3, seed).unwrap()).unwrap().a;
        let x0 = sparse_signal(&mut g, 96, 3, 2, false);
        let support = x0.block_support(0.0);
        if !exact_recovery_certificate(&dict, &support).unwrap().holds {
            continue;
        }
        let y = dict.apply(&x0).unwrap();
        let d0 = dict.select_blocks(support.indices()).unwrap();
        let pinv = d0.clone().pseudo_inverse(1e-12).unwrap();
        for iters in 1..=15 {
            let res = bmp(&dict, &y, iters, 0.0).unwrap();
            assert!(res.selection_order.iter().all(|l| support.contains(*l)));
            let r = &y - dict.apply(&res.x_hat).unwrap();
            let rr = r.norm_squared();
            if rr < 1e-16 * y.norm_squared() {
                break;
            }
            let c = &pinv * &r;
            assert!((&d0 * &c - &r).norm() < 1e-10 * y.norm());
            let best = (0..support.len())
                .map(|i| (d0.columns(i * 3, 3).adjoint() * &r).norm())
                .fold(0.0, f64::max);
            assert!(best >= rr / l21(c.as_slice(), 3) * (1.0 - 1e-10));
            checked += 1;
        }
    }
    assert!(checked > 50, "{checked}");
}

#[test]
fn lopt_objective_minimal_on_certified_instances() {
    let mut g = rng(5);
    let mut certified = 0;
    for seed in 0..40 {
        let dict = gaussian_dictionary(30, 60, 2, 100 + seed).unwrap();
        let x0 = sparse_signal(&mut g, 60, 2, 2, false);
        let support = x0.block_support(0.0);
        if !exact_recovery_certificate(&dict, &support).unwrap().holds {
            continue;
        }
        certified += 1;
        let y = dict.apply(&x0).unwrap();
        let res = lopt(&dict, &y, &LoptParams::default()).unwrap();
        assert_eq!(res.support, support);
        let base = l21(x0.entries().as_slice(), 2);
        assert!((l21(res.x_hat.entries().as_slice(), 2) - base).abs() < 1e-6 * base);

        let a = dict.entries();
        let proj = CMat::identity(60, 60) - a.clone().pseudo_inverse(1e-12).unwrap() * a;
        for _ in 0..20 {
            let h = &proj * random_vector(&mut g, 60, false);
            let h = h.scale(1e-2 * x0.entries().norm() / h.norm());
            assert!((a * &h).norm() < 1e-9);
            let alt = x0.entries() + h;
            assert!(l21(alt.as_slice(), 2) > base);
        }
    }
    assert!(certified >= 5, "{certified}");
}

#[test]
fn omp_recovers_below_conventional_threshold() {
    let (_, _, dict) = spike_kron_fourier(64, 1, &CMat::identity(1, 1)).unwrap();
    let mu = coherence(&dict).unwrap();
    assert!((mu - 0.125).abs() < 1e-12);
    let kmax = conventional_threshold(mu).unwrap().ceil() as usize - 1;
    assert_eq!(kmax, 4);
    let mut g = rng(9);
    for _ in 0..50 {
        let x0 = sparse_signal(&mut g, 128, 1, kmax, true);
        let y = dict.apply(&x0).unwrap();
        let res = omp(&dict, &y, kmax, 1e-10).unwrap();
        assert_eq!(res.support, x0.block_support(0.0));
        assert!(rel_err(res.x_hat.entries(), x0.entries()) < 1e-10);
    }
}

#[test]
fn bomp_recovers_below_block_threshold() {
    let u = random_unitary(4, 3);
    let (_, _, dict) = spike_kron_fourier(16, 4, &u).unwrap();
    let t = block_recovery_threshold(block_coherence(&dict).unwrap(), sub_coherence(&dict), 4).unwrap();
    let k = max_recoverable_k(block_coherence(&dict).unwrap(), sub_coherence(&dict), 4, 32).unwrap();
    assert!((k * 4) as f64 <= t && k >= 1);
    let mut g = rng(4);
    for _ in 0..50 {
        let x0 = sparse_signal(&mut g, 128, 4, k, true);
        let y = dict.apply(&x0).unwrap();
        let res = bomp(&dict, &y, k, 1e-10).unwrap();
        assert_eq!(res.support, x0.block_support(0.0));
        let bm = bmp(&dict, &y, 300, 1e-10).unwrap();
        assert!(bm.selection_order.iter().all(|l| x0.block_support(0.0).contains(*l)));
    }
}

#[test]
fn welch_bound_below_block_coherence() {
    for seed in 0..100 {
        let dict = orthogonalize_blocks(&gaussian_dictionary(12, 48, 2, seed).unwrap()).unwrap().a;
        let welch = welch_coherence_bound(24, 6, 2).unwrap();
        let mu_b = block_coherence(&dict).unwrap();
        assert!(mu_b >= welch - 1e-12, "seed {seed}: {mu_b} < {welch}");
        assert!((mu_b - block_coherence_oracle(dict.entries(), 2)).abs() < 1e-10);
    }
}

#[test]
fn uncertainty_never_violated() {
    let mut g = rng(21);
    for seed in 0..100u64 {
        let d = 1 + (seed % 3) as usize;
        let r = 4 + (seed % 5) as usize;
        let phi = BlockDictionary::new(CMat::identity(r * d, r * d), d).unwrap();
        let psi = BlockDictionary::new(random_unitary(r * d, seed), d).unwrap();
        let k = 1 + (seed % r as u64) as usize;
        let x = sparse_signal(&mut g, r * d, d, k, true);
        let check = verify_uncertainty(&phi, &psi, x.entries(), 1e-9).unwrap();
        assert!(check.geometric_ok && check.arithmetic_ok, "seed {seed}: {check}");
    }
    let (phi, psi, _) = spike_kron_fourier(9, 2, &CMat::identity(2, 2)).unwrap();
    let c = CVec::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 2.0)]);
    let comb = dirac_comb_signal(9, 2, &c).unwrap();
    assert!(verify_uncertainty(&phi, &psi, comb.entries(), 1e-9).unwrap().equality);
}

#[test]
fn recoverable_k_capped_by_rows() {
    for seed in 0..50 {
        let d = 1 + (seed % 4) as usize;
        let dict = gaussian_dictionary(8 * d, 32 * d, d, seed).unwrap();
        let cap = dict.rows() / d;
        let k = max_recoverable_k(block_coherence(&dict).unwrap(), sub_coherence(&dict), d, cap).unwrap();
        assert!(k <= cap);
        if k > 0 {
            let support = BlockSupport::new((0..k).collect()).unwrap();
            assert!(certificate_oracle(&dict, &support) < 1.0);
        }
    }
    assert_eq!(max_recoverable_k(0.0, 0.0, 2, 7).unwrap(), 7);
}
