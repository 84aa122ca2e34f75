use crate::error::{Error, Result};

/// Which reference state the shift-semigroup trigger compares against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZenoVariant {
    SampleRelative,
    CurrentRelative,
}

/// Event times `t_0 = 0, t_1, …, t_{k_max}` of the shift semigroup example,
/// from `t_{k+1} = t_k + r(1 − t_k)` with `r = ε²` or `ε²/(1+ε²)`.
pub fn shift_zeno_sequence(epsilon: f64, variant: ZenoVariant, k_max: usize) -> Result<Vec<f64>> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Domain(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    if k_max == 0 {
        return Err(Error::Domain("k_max must be at least 1".into()));
    }
    let e2 = epsilon * epsilon;
    let r = match variant {
        ZenoVariant::SampleRelative => e2,
        ZenoVariant::CurrentRelative => e2 / (1.0 + e2),
    };
    let mut t = Vec::with_capacity(k_max + 1);
    t.push(0.0);
    for k in 0..k_max {
        let tk = t[k];
        t.push(tk + r * (1.0 - tk));
    }
    Ok(t)
}

/// Closed form `1 − (1 − r)^k` of the same recurrence.
pub fn shift_zeno_closed_form(epsilon: f64, variant: ZenoVariant, k: usize) -> f64 {
    let e2 = epsilon * epsilon;
    let r = match variant {
        ZenoVariant::SampleRelative => e2,
        ZenoVariant::CurrentRelative => e2 / (1.0 + e2),
    };
    1.0 - (1.0 - r).powi(k as i32)
}

/// First event of the heat rod started on mode `n` under the state-error,
/// current-relative trigger: `log(1+ε)/(n²π²)`.
pub fn heat_first_event(epsilon: f64, n: usize) -> f64 {
    (1.0 + epsilon).ln() / (n as f64 * std::f64::consts::PI).powi(2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_terms() {
        let s = shift_zeno_sequence(0.5, ZenoVariant::SampleRelative, 2).unwrap();
        assert_eq!(s, vec![0.0, 0.25, 0.4375]);
        let c = shift_zeno_sequence(0.5, ZenoVariant::CurrentRelative, 1).unwrap();
        assert!((c[1] - 0.2).abs() < 1e-16);
    }

    #[test]
    fn converges_to_one() {
        let s = shift_zeno_sequence(0.5, ZenoVariant::SampleRelative, 200).unwrap();
        assert!(s[..51].windows(2).all(|w| w[1] > w[0]));
        assert!(s.windows(2).all(|w| w[1] >= w[0]));
        assert!(s[..51].iter().all(|&t| t < 1.0));
        assert!(1.0 - s[200] < 1e-15);
        let gaps: Vec<f64> = s.windows(2).map(|w| w[1] - w[0]).collect();
        assert!(gaps[50] < 1e-6 * gaps[0]);
    }

    #[test]
    fn domain() {
        assert!(shift_zeno_sequence(1.0, ZenoVariant::SampleRelative, 3).is_err());
        assert!(shift_zeno_sequence(0.5, ZenoVariant::SampleRelative, 0).is_err());
    }
}
