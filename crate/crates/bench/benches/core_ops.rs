use criterion::{black_box, criterion_group, criterion_main, Criterion};

use ris_core::*;

fn quarter_wave(nv: usize, nh: usize) -> RisGeometry {
    RisGeometry::new(nv, nh, 0.025, 0.1, 0.025, 0.025).unwrap()
}

fn desk_config() -> SystemConfig {
    let users = 4;
    let total = dbm_to_watts(20.0);
    SystemConfig {
        bs_correlation: BsCorrelationSpec::new(16, 0.8, 0.0).unwrap(),
        ris1: quarter_wave(8, 8),
        ris2: quarter_wave(8, 8),
        layout: NodeLayout::standard(users),
        path_loss_exponent: 2.7,
        wavelength: 0.1,
        noise_power_w: dbm_to_watts(-94.0),
        total_power_w: total,
        user_powers_w: SystemConfig::equal_power_split(total, users),
        kappa: 4.0,
        trials: 100,
        seed: 1,
    }
}

fn bench_psd_sqrt(c: &mut Criterion) {
    let r = build_ris_correlation(&quarter_wave(8, 8)).unwrap();
    c.bench_function("hermitian_psd_sqrt_64", |b| {
        b.iter(|| hermitian_psd_sqrt(black_box(&r), None).unwrap())
    });
}

fn bench_correlation_builders(c: &mut Criterion) {
    let geom = quarter_wave(10, 10);
    c.bench_function("build_ris_correlation_100", |b| {
        b.iter(|| build_ris_correlation(black_box(&geom)).unwrap())
    });
    let spec = BsCorrelationSpec::new(64, 0.8, 0.3).unwrap();
    c.bench_function("build_bs_correlation_64", |b| {
        b.iter(|| build_bs_correlation(black_box(&spec)).unwrap())
    });
}

fn bench_phase_weighted_trace(c: &mut Criterion) {
    let r = build_ris_correlation(&quarter_wave(10, 10)).unwrap();
    let theta: Vec<f64> = (0..100).map(|i| 0.37 * i as f64).collect();
    c.bench_function("phase_weighted_trace_100", |b| {
        b.iter(|| phase_weighted_trace(black_box(&r), black_box(&theta)).unwrap())
    });
}

fn bench_channel_draw(c: &mut Criterion) {
    let config = desk_config();
    let corr = CorrelationSet::build(&config.bs_correlation, &config.ris1, &config.ris2).unwrap();
    let gains = PathGains::from_config(&config).unwrap();
    let phases = optimal_phase_config(corr.ris1_elements(), corr.ris2_elements(), 0.0);
    let noise_model = PhaseNoiseModel::new(config.kappa).unwrap();
    c.bench_function("draw_channels_desk_scale", |b| {
        let mut trial = 0u64;
        b.iter(|| {
            trial += 1;
            draw_channels(&gains, &corr, &mut substream(1, trial))
        })
    });
    c.bench_function("effective_channel_desk_scale", |b| {
        let mut rng = substream(1, 0);
        let real = draw_channels(&gains, &corr, &mut rng);
        let noise1 = noise_model.sample(corr.ris1_elements(), &mut rng);
        let noise2 = noise_model.sample(corr.ris2_elements(), &mut rng);
        b.iter(|| effective_channel(black_box(&real), &phases, &noise1, &noise2, 0).unwrap())
    });
}

fn bench_eta(c: &mut Criterion) {
    let inputs = EtaInputs {
        beta_b1: 3e-7,
        beta_b2: 8e-9,
        beta_1k: 5e-8,
        beta_2k: 2e-7,
        beta_g: 6e-12,
        varphi: 0.86,
        n1: 64,
        n2: 64,
        v1: 270.0,
        v2: 270.0,
    };
    c.bench_function("eta_k_closed_form", |b| {
        b.iter(|| eta_k(black_box(&inputs)).unwrap())
    });
}

fn bench_von_mises(c: &mut Criterion) {
    let model = PhaseNoiseModel::new(4.0).unwrap();
    c.bench_function("sample_von_mises_64", |b| {
        let mut rng = substream(2, 0);
        b.iter(|| model.sample(64, &mut rng))
    });
    c.bench_function("vm_cf", |b| {
        b.iter(|| vm_cf(black_box(37.5)).unwrap())
    });
}

criterion_group!(
    benches,
    bench_psd_sqrt,
    bench_correlation_builders,
    bench_phase_weighted_trace,
    bench_channel_draw,
    bench_eta,
    bench_von_mises
);
criterion_main!(benches);
