use approx::assert_abs_diff_eq;
use lrqc::ensemble::{center_out_order, expanding_order};
use lrqc::path1d::{self, PathParams};
use lrqc::spectral::{local_matrix, mixture_matrix, product_matrix};
use lrqc::{
    build_swap_matrix, fixed_space_dimension, purity_infinity, purity_trajectory, EnsembleSpec, LocalStructure,
    Policy, Region, SwapVector,
};

fn r(sites: &[usize], n: usize) -> Region {
    Region::from_sites(sites.iter().copied(), n).unwrap()
}

/// `Σ_{Ω₁..Ω_k} q₁(Ω₁) Π M(Ω_i → Ω_{i+1}) ⟨R_{Ω₁} ∘ ⋯ ∘ R_{Ω_k}(T_A)⟩`
/// over every region sequence.
fn markov_brute_force(target: &Region, s: &LocalStructure, initial: &[f64], m: &[Vec<f64>], d: u32, k: usize) -> f64 {
    let len = s.len();
    let mut total = 0.0;
    for code in 0..len.pow(k as u32) {
        let seq: Vec<usize> = (0..k).map(|i| code / len.pow(i as u32) % len).collect();
        let mut p = initial[seq[0]];
        for w in seq.windows(2) {
            p *= m[w[0]][w[1]];
        }
        if p == 0.0 {
            continue;
        }
        let mut v = SwapVector::swap(*target);
        for &i in seq.iter().rev() {
            v = v.apply_local(&s.regions()[i], d).unwrap();
        }
        total += p * v.contract_factorized();
    }
    total
}

#[test]
fn markov_matches_path_enumeration() {
    let s = LocalStructure::path(5).unwrap();
    let target = r(&[0, 1], 5);
    // an asymmetric chain so the time-order convention matters
    let initial = vec![0.7, 0.1, 0.1, 0.1];
    let m = vec![
        vec![0.1, 0.6, 0.2, 0.1],
        vec![0.0, 0.2, 0.5, 0.3],
        vec![0.4, 0.0, 0.1, 0.5],
        vec![0.25, 0.25, 0.25, 0.25],
    ];
    for d in [2u32, 3] {
        let spec = EnsembleSpec::new(s.clone(), Policy::Markov { initial: initial.clone(), transition: m.clone() }, d).unwrap();
        let traj = purity_trajectory(&target, &spec, 5).unwrap();
        for (k, p) in traj.iter().enumerate().skip(1) {
            let want = markov_brute_force(&target, &s, &initial, &m, d, k);
            assert_abs_diff_eq!(*p, want, epsilon = 1e-12);
        }
    }
}

#[test]
fn markov_with_identical_rows_is_uncorrelated() {
    let s = LocalStructure::from_site_lists(5, &[vec![0, 1], vec![1, 2, 3], vec![3, 4], vec![0, 4]], Some(vec![0.1, 0.2, 0.3, 0.4]))
        .unwrap();
    let q = s.weights();
    let markov = EnsembleSpec::new(s.clone(), Policy::Markov { initial: q.clone(), transition: vec![q.clone(); 4] }, 2).unwrap();
    let plain = EnsembleSpec::uncorrelated(s, 2).unwrap();
    let target = r(&[1, 2], 5);
    let a = purity_trajectory(&target, &markov, 8).unwrap();
    let b = purity_trajectory(&target, &plain, 8).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert_abs_diff_eq!(x, y, epsilon = 1e-12);
    }
}

#[test]
fn markov_identity_is_constant_after_first_step() {
    let s = LocalStructure::path(4).unwrap();
    let id: Vec<Vec<f64>> = (0..3).map(|i| (0..3).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    let spec = EnsembleSpec::new(s, Policy::Markov { initial: vec![0.2, 0.3, 0.5], transition: id }, 3).unwrap();
    let traj = purity_trajectory(&r(&[0, 1], 4), &spec, 6).unwrap();
    for p in &traj[2..] {
        assert_abs_diff_eq!(*p, traj[1], epsilon = 1e-12);
    }
}

#[test]
fn path_solution_embeds_in_full_dynamics() {
    for len in 2..=6 {
        let s = LocalStructure::path(len).unwrap();
        for d in [2u32, 3] {
            let spec = EnsembleSpec::uncorrelated(s.clone(), d).unwrap();
            for cut in 0..=len {
                let p = PathParams::new(len, d, cut).unwrap();
                let target = Region::interval(0, cut, len).unwrap();
                let traj = purity_trajectory(&target, &spec, 30).unwrap();
                for (k, x) in traj.iter().enumerate() {
                    assert_abs_diff_eq!(*x, path1d::purity_exact(&p, k), epsilon = 1e-12);
                }
            }
        }
    }
}

#[test]
fn nested_interval_block_is_the_reduced_matrix() {
    for len in [3usize, 5] {
        let spec = EnsembleSpec::uncorrelated(LocalStructure::path(len).unwrap(), 2).unwrap();
        let m = build_swap_matrix(&spec).unwrap().matrix;
        let reduced = path1d::reduced_matrix(&PathParams::new(len, 2, 0).unwrap());
        let idx: Vec<usize> = (0..=len).map(|j| (1usize << j) - 1).collect();
        for (i, &a) in idx.iter().enumerate() {
            for (j, &b) in idx.iter().enumerate() {
                assert_abs_diff_eq!(m[(a, b)], reduced[(i, j)], epsilon = 1e-15);
            }
        }
    }
}

#[test]
fn three_site_gap_matches_path_spectrum() {
    let spec = EnsembleSpec::uncorrelated(LocalStructure::path(3).unwrap(), 2).unwrap();
    let gap = lrqc::spectral_gap_swap(&build_swap_matrix(&spec).unwrap()).unwrap();
    assert_abs_diff_eq!(gap, path1d::spectrum(&PathParams::new(3, 2, 0).unwrap()).gap, epsilon = 1e-12);
}

#[test]
fn uniform_path_gap_matches_closed_form() {
    for len in 3..=7 {
        let spec = EnsembleSpec::uncorrelated(LocalStructure::path(len).unwrap(), 2).unwrap();
        let gap = lrqc::spectral_gap_swap(&build_swap_matrix(&spec).unwrap()).unwrap();
        assert_abs_diff_eq!(gap, path1d::spectral_gap_1d(&PathParams::new(len, 2, 0).unwrap()), epsilon = 1e-10);
    }
}

#[test]
fn fixed_space_dimensions() {
    for n in 2..=8usize {
        for d in [2u32, 3] {
            // single region: 2^{n − |Ω| + 1}
            for sites in [vec![0], vec![0, 1], vec![1, n - 1]] {
                let local = r(&sites, n);
                let dim = fixed_space_dimension(&local_matrix(&local, d).unwrap()).unwrap();
                assert_eq!(dim, 1 << (n - local.len() + 1), "n={n} {local}");
            }
            if n >= 3 {
                // overlapping pair: Fix(R₁) ∩ Fix(R₂) = Fix(R_{Ω₁ ∪ Ω₂})
                let (a, b) = (r(&[0, 1], n), r(&[1, 2], n));
                let both = product_matrix(n, &[a, b], d).unwrap();
                let union = local_matrix(&a.union(&b).unwrap(), d).unwrap();
                assert_eq!(fixed_space_dimension(&both).unwrap(), fixed_space_dimension(&union).unwrap());
            }
            if n >= 4 {
                // disjoint pair: product of the separate counts on the shared universe
                let (a, b) = (r(&[0, 1], n), r(&[2, 3], n));
                let both = product_matrix(n, &[a, b], d).unwrap();
                assert_eq!(fixed_space_dimension(&both).unwrap(), 1 << (n - 4 + 2));
            }
        }
    }
}

#[test]
fn fixed_space_counts_components() {
    let connected = EnsembleSpec::uncorrelated(LocalStructure::path(6).unwrap(), 2).unwrap();
    assert_eq!(fixed_space_dimension(&build_swap_matrix(&connected).unwrap()).unwrap(), 2);
    for k in 1..=3usize {
        let lists: Vec<Vec<usize>> = (0..k).map(|i| vec![2 * i, 2 * i + 1]).collect();
        let s = LocalStructure::from_site_lists(2 * k, &lists, None).unwrap();
        let m = mixture_matrix(2 * k, s.regions(), &s.weights(), 3).unwrap();
        assert_eq!(fixed_space_dimension(&m).unwrap(), 1 << k);
    }
}

#[test]
fn trajectories_reach_the_limit() {
    for n in [4usize, 6, 8] {
        let path = LocalStructure::path(n).unwrap();
        let target = r(&[0, 1], n);
        let p_inf = purity_infinity(&target, &path, 2).unwrap();
        let plain = EnsembleSpec::uncorrelated(path.clone(), 2).unwrap();
        let traj = purity_trajectory(&target, &plain, 2000).unwrap();
        assert!((traj[2000] - p_inf).abs() <= 1e-8, "n={n}");
        for order in [expanding_order(n - 1), center_out_order(n - 1)] {
            let spec = EnsembleSpec::new(path.clone(), Policy::sweep(order), 2).unwrap();
            let traj = purity_trajectory(&target, &spec, 200).unwrap();
            assert!((traj[200] - p_inf).abs() <= 1e-8, "n={n}");
        }
    }
    let pairs = LocalStructure::from_site_lists(4, &[vec![0, 1], vec![2, 3]], None).unwrap();
    let spec = EnsembleSpec::uncorrelated(pairs.clone(), 2).unwrap();
    let target = r(&[0, 2], 4);
    let traj = purity_trajectory(&target, &spec, 200).unwrap();
    assert_abs_diff_eq!(traj[200], purity_infinity(&target, &pairs, 2).unwrap(), epsilon = 1e-8);
    assert_abs_diff_eq!(traj[200], 0.64, epsilon = 1e-8);
}

#[test]
fn expanding_sweep_short_time_law() {
    // a boundary block loses purity by (1 − e_p)/(1 + e_p) per sweep until the
    // staircase has crossed it; the far end of the chain perturbs this by an
    // amount that shrinks exponentially with its distance
    for d in [2u32, 3] {
        let ep = path1d::e_p(d);
        let ratio = (1.0 - ep) / (1.0 + ep);
        for (len, cut) in [(30usize, 8usize), (36, 8)] {
            let spec = EnsembleSpec::new(LocalStructure::path(len).unwrap(), Policy::sweep(expanding_order(len - 1)), d).unwrap();
            let traj = purity_trajectory(&Region::interval(0, cut, len).unwrap(), &spec, cut).unwrap();
            for (k, p) in traj.iter().enumerate() {
                let want = ratio.powi(k as i32);
                assert!((p - want).abs() <= 1e-5 * want, "d={d} L={len} k={k}: {p} vs {want}");
            }
        }
    }
}
