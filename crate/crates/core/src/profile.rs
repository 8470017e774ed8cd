//! Univariate ridge profiles and the named profile registry.

use std::sync::Arc;

use crate::error::{Error, Result};

/// Shared scalar function `R -> R`.
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Structure tag consulted by fast evaluation paths. The stored closure
/// is always the ground truth; the tag only licenses an algebraically
/// equivalent evaluation order.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileKind {
    /// `v(xi) = sin(freq * xi)`
    Sin { freq: f64 },
    /// `v(xi) = cos(freq * xi)`
    Cos { freq: f64 },
    /// `v(xi) = 1` for `xi >= 0`, else `0`
    Heaviside,
    /// No exploitable structure.
    Generic,
}

/// A ridge profile: a named univariate function.
#[derive(Clone)]
pub struct Profile {
    id: String,
    kind: ProfileKind,
    func: ScalarFn,
}

impl std::fmt::Debug for Profile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Profile")
            .field("id", &self.id)
            .field("kind", &self.kind)
            .finish()
    }
}

impl Profile {
    /// Wraps an arbitrary closure as a profile.
    pub fn new(id: impl Into<String>, func: ScalarFn) -> Self {
        Self { id: id.into(), kind: ProfileKind::Generic, func }
    }

    fn with_kind(id: String, kind: ProfileKind, func: ScalarFn) -> Self {
        Self { id, kind, func }
    }

    /// Profile given by a table of samples, evaluated by 1-d linear
    /// interpolation and zero outside the tabulated range.
    pub fn from_table(id: impl Into<String>, xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(Error::Config("table needs >= 2 matching samples".into()));
        }
        if xs.windows(2).any(|w| !(w[0] < w[1])) || xs.iter().any(|x| !x.is_finite()) {
            return Err(Error::Config("table abscissas must be finite and strictly increasing".into()));
        }
        if ys.iter().any(|y| !y.is_finite()) {
            return Err(Error::Config("table values must be finite".into()));
        }
        let func: ScalarFn = Arc::new(move |xi: f64| {
            if xi < xs[0] || xi > xs[xs.len() - 1] {
                return 0.0;
            }
            let j = match xs.partition_point(|&x| x <= xi) {
                0 => 0,
                p => (p - 1).min(xs.len() - 2),
            };
            let t = (xi - xs[j]) / (xs[j + 1] - xs[j]);
            ys[j] + t * (ys[j + 1] - ys[j])
        });
        Ok(Self::new(id, func))
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    #[inline]
    pub fn eval(&self, xi: f64) -> f64 {
        (self.func)(xi)
    }
}

/// Ordered collection of profiles; duplicates are permitted.
#[derive(Debug, Clone, Default)]
pub struct ProfileSet {
    profiles: Vec<Profile>,
}

impl ProfileSet {
    pub fn new(profiles: Vec<Profile>) -> Self {
        Self { profiles }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    pub fn profiles(&self) -> &[Profile] {
        &self.profiles
    }

    pub fn get(&self, j: usize) -> &Profile {
        &self.profiles[j]
    }

    /// Resolves `(name, arg_scale)` pairs through the registry.
    pub fn from_names(entries: &[(&str, f64)]) -> Result<Self> {
        entries
            .iter()
            .map(|&(name, scale)| by_name_scaled(name, scale))
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }
}

/// Names understood by [`by_name`].
pub const PROFILE_NAMES: &[&str] = &[
    "sin",
    "cos",
    "mexican-hat",
    "haar",
    "morlet",
    "hockeystick",
    "relu",
    "heaviside",
    "abs-shift",
    "square",
];

/// Looks up a profile by name with unit argument scale.
pub fn by_name(name: &str) -> Result<Profile> {
    by_name_scaled(name, 1.0)
}

/// Looks up a profile by name; the returned profile is
/// `v(xi) = base(arg_scale * xi)`.
pub fn by_name_scaled(name: &str, arg_scale: f64) -> Result<Profile> {
    if !arg_scale.is_finite() || arg_scale == 0.0 {
        return Err(Error::Config(format!(
            "profile '{name}': arg_scale must be finite and nonzero, got {arg_scale}"
        )));
    }
    let s = arg_scale;
    let id = if s == 1.0 {
        name.to_string()
    } else {
        format!("{name}({s}x)")
    };
    let profile = match name {
        "sin" => Profile::with_kind(id, ProfileKind::Sin { freq: s }, Arc::new(move |xi| (s * xi).sin())),
        "cos" => Profile::with_kind(id, ProfileKind::Cos { freq: s }, Arc::new(move |xi| (s * xi).cos())),
        "mexican-hat" => Profile::new(id, Arc::new(move |xi| {
            let x = s * xi;
            (1.0 - x * x) * (-0.5 * x * x).exp()
        })),
        "haar" => Profile::new(id, Arc::new(move |xi| {
            let x = s * xi;
            if (0.0..0.5).contains(&x) {
                1.0
            } else if (0.5..1.0).contains(&x) {
                -1.0
            } else {
                0.0
            }
        })),
        "morlet" => Profile::new(id, Arc::new(move |xi| {
            let x = s * xi;
            (5.0 * x).cos() * (-0.5 * x * x).exp()
        })),
        "hockeystick" | "relu" => Profile::new(id, Arc::new(move |xi| (s * xi).max(0.0))),
        "heaviside" => {
            let func: ScalarFn = Arc::new(move |xi| if s * xi >= 0.0 { 1.0 } else { 0.0 });
            // positive scaling does not move the jump
            let kind = if s > 0.0 { ProfileKind::Heaviside } else { ProfileKind::Generic };
            Profile::with_kind(id, kind, func)
        }
        "abs-shift" => Profile::new(id, Arc::new(move |xi| (s * xi - 0.5).abs())),
        "square" => Profile::new(id, Arc::new(move |xi| (s * xi) * (s * xi))),
        _ => {
            return Err(Error::Usage(format!(
                "unknown profile '{name}' (known: {})",
                PROFILE_NAMES.join(", ")
            )))
        }
    };
    Ok(profile)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_values_at_zero() {
        assert_eq!(by_name("sin").unwrap().eval(0.0), 0.0);
        assert_eq!(by_name("cos").unwrap().eval(0.0), 1.0);
        assert_eq!(by_name("mexican-hat").unwrap().eval(0.0), 1.0);
        assert_eq!(by_name("haar").unwrap().eval(0.0), 1.0);
        assert_eq!(by_name("morlet").unwrap().eval(0.0), 1.0);
        assert_eq!(by_name("hockeystick").unwrap().eval(0.0), 0.0);
        assert_eq!(by_name("heaviside").unwrap().eval(0.0), 1.0);
        assert_eq!(by_name("abs-shift").unwrap().eval(0.0), 0.5);
        assert_eq!(by_name("square").unwrap().eval(3.0), 9.0);
    }

    #[test]
    fn haar_pieces() {
        let h = by_name("haar").unwrap();
        assert_eq!(h.eval(0.25), 1.0);
        assert_eq!(h.eval(0.75), -1.0);
        assert_eq!(h.eval(-0.1), 0.0);
        assert_eq!(h.eval(1.0), 0.0);
    }

    #[test]
    fn scaled_sin_kind() {
        let p = by_name_scaled("sin", 10.0).unwrap();
        assert_eq!(*p.kind(), ProfileKind::Sin { freq: 10.0 });
        assert!((p.eval(0.3) - (3.0f64).sin()).abs() < 1e-15);
    }

    #[test]
    fn unknown_name_rejected() {
        assert!(matches!(by_name("wavelet-42"), Err(Error::Usage(_))));
        assert!(by_name_scaled("sin", 0.0).is_err());
    }

    #[test]
    fn table_interpolates_and_vanishes_outside() {
        let xs: Vec<f64> = (0..41).map(|i| -2.0 + 0.1 * i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x.sin()).collect();
        let p = Profile::from_table("u0-table", xs, ys).unwrap();
        assert!((p.eval(0.537) - 0.537f64.sin()).abs() < 2e-3);
        assert!((p.eval(-1.0) - (-1.0f64).sin()).abs() < 1e-12);
        assert_eq!(p.eval(5.0), 0.0);
        assert_eq!(p.eval(-2.5), 0.0);
    }

    #[test]
    fn table_rejects_bad_input() {
        assert!(Profile::from_table("t", vec![0.0], vec![1.0]).is_err());
        assert!(Profile::from_table("t", vec![0.0, 0.0], vec![1.0, 2.0]).is_err());
    }
}
