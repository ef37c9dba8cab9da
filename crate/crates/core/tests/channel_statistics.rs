use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use uavsim_core::channel::{draw_channel, mimo_downlink, mimo_uplink, ComplexMatrix};

#[test]
fn rayleigh_entries_have_unit_power() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let h = draw_channel(100, 1000, &mut rng).unwrap();
    let n = h.entries().len() as f64;
    let power = h.entries().iter().map(|z| z.norm_sqr()).sum::<f64>() / n;
    assert!((power - 1.0).abs() < 0.05, "{power}");
    let mean = h.entries().iter().sum::<Complex64>() / n;
    assert!(mean.norm() < 0.01, "{mean}");
}

#[test]
fn downlink_noise_has_requested_variance() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let sigma = 0.1;
    let column = ComplexMatrix::zeros(100_000, 1);
    let y = mimo_downlink(&column, &ComplexMatrix::identity(1), sigma, &mut rng).unwrap();
    let n = y.entries().len() as f64;
    let mean = y.entries().iter().sum::<Complex64>() / n;
    let var = y.entries().iter().map(|z| (z - mean).norm_sqr()).sum::<f64>() / (n - 1.0);
    assert!((var / (sigma * sigma) - 1.0).abs() < 0.05, "{var}");
}

#[test]
fn linear_noiseless_chain_is_a_matrix_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let x = draw_channel(4, 2, &mut rng).unwrap();
    let h_ul = draw_channel(2, 2, &mut rng).unwrap();
    let h_dl = draw_channel(2, 100, &mut rng).unwrap();
    let y = mimo_uplink(&x, &h_ul, 0.0).unwrap();
    let z = mimo_downlink(&y, &h_dl, 0.0, &mut rng).unwrap();
    let direct = x.matmul(&h_ul).unwrap().matmul(&h_dl).unwrap();
    for (a, b) in z.entries().iter().zip(direct.entries()) {
        assert!((a - b).norm() <= 1e-12 * b.norm().max(1.0));
    }
}
