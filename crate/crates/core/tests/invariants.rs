use besov_core::counterexample::{slice_coefficients, Counterexample, CounterexampleSpec};
use besov_core::grid::{shift, Direction, Grid, GridFunction, Measure, VectorFieldGrid};
use besov_core::math::{fft, GaussHermite};
use besov_core::measure::{shift_measure, tv_distance, GridMeasure};
use besov_core::seminorm::shift_quotient;
use besov_core::witness::{v_quotient, TestObject};
use proptest::prelude::*;

fn trig_function(grid: &Grid, coeffs: &[f64]) -> GridFunction {
    GridFunction::from_fn(grid.clone(), Measure::Lebesgue, |x| {
        let envelope = (-x[0] * x[0] / 2.0).exp();
        envelope * coeffs.iter().enumerate().map(|(k, c)| c * ((k as f64 + 1.0) * x[0]).sin()).sum::<f64>()
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn fft_round_trip(values in prop::collection::vec(-10.0f64..10.0, 64)) {
        let mut re = values.clone();
        let mut im = vec![0.0; 64];
        fft(&mut re, &mut im, false).unwrap();
        fft(&mut re, &mut im, true).unwrap();
        for (a, b) in re.iter().zip(&values) {
            prop_assert!((a - b).abs() < 1e-10);
        }
        prop_assert!(im.iter().all(|v| v.abs() < 1e-10));
    }

    #[test]
    fn gauss_hermite_integrates_polynomials(c in prop::collection::vec(-3.0f64..3.0, 5)) {
        // E[Z^k] = 0, 1, 0, 3 for k = 1..4
        let rule = GaussHermite::new(16).unwrap();
        let got = rule.expect(|x| c[0] + c[1] * x + c[2] * x * x + c[3] * x.powi(3) + c[4] * x.powi(4));
        let want = c[0] + c[2] + 3.0 * c[4];
        prop_assert!((got - want).abs() < 1e-10 * (1.0 + want.abs()));
    }

    #[test]
    fn shift_quotient_is_absolutely_homogeneous(
        coeffs in prop::collection::vec(-1.0f64..1.0, 3),
        scale in -5.0f64..5.0,
        h in 0.05f64..1.0,
        p in 1.0f64..3.0,
    ) {
        let grid = Grid::line(-8.0, 8.0, 513).unwrap();
        let f = trig_function(&grid, &coeffs);
        let a = shift_quotient(&f, &[h], p, 0.5).unwrap();
        let b = shift_quotient(&f.scaled(scale), &[h], p, 0.5).unwrap();
        prop_assert!((b - scale.abs() * a).abs() <= 1e-9 * (1.0 + b.abs()));
    }

    #[test]
    fn v_quotient_ignores_test_scaling(
        coeffs in prop::collection::vec(-1.0f64..1.0, 3),
        lambda in 0.1f64..10.0,
        alpha in 0.1f64..1.0,
    ) {
        let grid = Grid::line(-8.0, 8.0, 513).unwrap();
        let f = trig_function(&grid, &coeffs);
        let psi = GridFunction::from_fn(grid.clone(), Measure::Lebesgue, |x| (-x[0] * x[0]).exp() * x[0].cos()).unwrap();
        let field = VectorFieldGrid::new(vec![psi]).unwrap();
        let a = v_quotient(&f, &TestObject::Field(field.clone()), 2.0, alpha);
        let b = v_quotient(&f, &TestObject::Field(field.scaled(lambda)), 2.0, alpha);
        if let (Ok(a), Ok(b)) = (a, b) {
            prop_assert!((a.quotient - b.quotient).abs() <= 1e-9 * (1.0 + a.quotient.abs()));
        }
    }

    #[test]
    fn shifts_compose_on_the_interior(coeffs in prop::collection::vec(-1.0f64..1.0, 3), a in -0.5f64..0.5, b in -0.5f64..0.5) {
        let grid = Grid::line(-8.0, 8.0, 1025).unwrap();
        let f = trig_function(&grid, &coeffs);
        let two = shift(&shift(&f, &[a]).unwrap(), &[b]).unwrap();
        let one = shift(&f, &[a + b]).unwrap();
        // Linear interpolation error is O(step^2 f'').
        let err = two.sub(&one).unwrap().max_abs();
        prop_assert!(err < 2e-3, "{}", err);
    }

    #[test]
    fn tv_is_a_metric_on_shifts(h1 in -1.0f64..1.0, h2 in -1.0f64..1.0, h3 in -1.0f64..1.0) {
        let mu = GridMeasure::gaussian(Grid::line(-10.0, 10.0, 1001).unwrap()).unwrap();
        let m: Vec<GridMeasure> = [h1, h2, h3].iter().map(|h| shift_measure(&mu, &[*h]).unwrap()).collect();
        let d = |i: usize, j: usize| tv_distance(&m[i], &m[j]).unwrap();
        prop_assert!((d(0, 1) - d(1, 0)).abs() < 1e-14);
        prop_assert!(d(0, 1) <= 2.0 + 1e-12);
        prop_assert!(d(0, 2) <= d(0, 1) + d(1, 2) + 1e-12);
    }

    #[test]
    fn directions_are_unit(x in -5.0f64..5.0, y in -5.0f64..5.0) {
        prop_assume!(x.hypot(y) > 1e-6);
        let e = Direction::new(vec![x, y]).unwrap();
        let n: f64 = e.components().iter().map(|c| c * c).sum();
        prop_assert!((n - 1.0).abs() < 1e-12);
    }

    #[test]
    fn counterexample_slice_coefficients_match_covering(y in 0.0f64..1.0) {
        let ce = Counterexample::new(CounterexampleSpec::new(0.5, 200, 2).unwrap()).unwrap();
        let a = slice_coefficients(&ce, y, 200).unwrap();
        for k in 1..=200usize {
            let want = if k >= 2 && ce.covers(k, y) { std::f64::consts::PI * ce.coefficient(k) } else { 0.0 };
            prop_assert!((a[k - 1] - want).abs() < 1e-9, "k={} got={} want={}", k, a[k - 1], want);
        }
    }
}
