use nlslab_runner::config::{KernelChoice, Preset};
use nlslab_runner::{parse_config, ScenarioConfig};
use proptest::prelude::*;

fn config() -> impl Strategy<Value = ScenarioConfig> {
    (
        ("[a-z][a-z0-9 _-]{0,12}", prop_oneof![Just(-1i64), Just(1)], any::<u64>(), any::<bool>()),
        (6u32..12, 1.0f64..500.0, 1e-5f64..1e-2, 1usize..500, any::<bool>(), proptest::option::of(0.5f64..20.0)),
        (0usize..4, 0.01f64..3.0, 0.1f64..4.0, -10.0f64..10.0, -20i64..20),
        (0.01f64..0.49, 1e-3f64..1.0, 0.1f64..5.0, 0usize..3, proptest::option::of(0.01f64..5.0)),
    )
        .prop_map(|((name, mu, seed, checkpoint), (log_n, length, dt, save_every, dealias, cutoff), (preset, amp, sigma, center, mode), (eta, eps0, c_eta, kernel, i_cutoff))| {
            let mut c = ScenarioConfig::new(name, mu);
            c.seed = seed;
            c.checkpoint = checkpoint;
            c.grid.n = 1 << log_n;
            c.grid.length = length;
            c.integrator.dt = dt;
            c.integrator.t_end = dt * 1000.0;
            c.integrator.save_every = save_every;
            c.integrator.dealias = dealias;
            c.integrator.spectral_cutoff = cutoff;
            c.initial.preset = Preset::ALL[preset];
            c.initial.amp = amp;
            c.initial.sigma = sigma;
            c.initial.center = center;
            c.initial.xi0 = mode as f64 * 2.0 * std::f64::consts::PI / length;
            c.concentration.eta = eta;
            c.concentration.eps0 = eps0;
            c.concentration.c_eta = c_eta;
            c.morawetz.kernel = [KernelChoice::OddErf, KernelChoice::TwoSidedErf, KernelChoice::Sign][kernel];
            c.morawetz.i_cutoff = i_cutoff;
            c
        })
}

proptest! {
    #[test]
    fn echo_is_closed_under_parsing(c in config()) {
        let text = c.echo();
        let back = parse_config(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(back.echo(), text);
    }

    #[test]
    fn any_other_mu_is_rejected(mu in any::<i64>().prop_filter("not a sign", |m| m.abs() != 1)) {
        let e = parse_config(&format!("scenario = \"s\"\nmu = {mu}\n")).unwrap_err();
        prop_assert_eq!(e.0[0].line, Some(2));
        prop_assert!(e.0[0].message.contains("μ must be ±1"));
    }
}
