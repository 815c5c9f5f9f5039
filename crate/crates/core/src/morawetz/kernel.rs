/// `sqrt(pi) / 2`, the limit of the odd erf profile at `+inf`.
pub const HALF_SQRT_PI: f64 = 0.886_226_925_452_757_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelProfile {
    /// `int_0^{z/eps} e^{-s^2} ds`.
    Erf { width: f64 },
    /// `eps -> 0` limit, `(sqrt(pi)/2) sign(z)`.
    Sign,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelVariant {
    /// `int_{-inf}^{z/eps} e^{-s^2} ds`.
    TwoSided,
    /// `int_0^{z/eps} e^{-s^2} ds`.
    Odd,
}

/// Weight `a(x - y)` of the interaction Morawetz action.
///
/// Every kernel splits as `offset + (sqrt(pi)/2) sign(z) + decay(z)` with
/// `decay` odd and integrable, which is what the fast evaluation uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MorawetzKernel {
    pub profile: KernelProfile,
    pub variant: KernelVariant,
}

impl MorawetzKernel {
    pub fn odd_erf(width: f64) -> Self {
        Self { profile: KernelProfile::Erf { width }, variant: KernelVariant::Odd }
    }

    pub fn two_sided_erf(width: f64) -> Self {
        Self { profile: KernelProfile::Erf { width }, variant: KernelVariant::TwoSided }
    }

    pub fn sign() -> Self {
        Self { profile: KernelProfile::Sign, variant: KernelVariant::Odd }
    }

    /// Default width: four grid spacings.
    pub fn default_for(dx: f64) -> Self {
        Self::odd_erf(4.0 * dx)
    }

    pub fn eval(&self, z: f64) -> f64 {
        self.offset() + self.odd_part(z)
    }

    pub fn offset(&self) -> f64 {
        match self.variant {
            KernelVariant::TwoSided => HALF_SQRT_PI,
            KernelVariant::Odd => 0.0,
        }
    }

    pub fn odd_part(&self, z: f64) -> f64 {
        match self.profile {
            KernelProfile::Erf { width } => HALF_SQRT_PI * libm::erf(z / width),
            KernelProfile::Sign => HALF_SQRT_PI * sign(z),
        }
    }

    /// `odd_part(z) - (sqrt(pi)/2) sign(z)`, computed through `erfc` so the
    /// tail keeps full relative precision.
    pub fn decay(&self, z: f64) -> f64 {
        match self.profile {
            KernelProfile::Erf { width } => -HALF_SQRT_PI * sign(z) * libm::erfc(z.abs() / width),
            KernelProfile::Sign => 0.0,
        }
    }

    /// Length scale used for sampling; 1 for the sign kernel.
    pub fn scale(&self) -> f64 {
        match self.profile {
            KernelProfile::Erf { width } => width,
            KernelProfile::Sign => 1.0,
        }
    }
}

fn sign(z: f64) -> f64 {
    if z > 0.0 {
        1.0
    } else if z < 0.0 {
        -1.0
    } else {
        0.0
    }
}

pub fn kernel_eval(k: &MorawetzKernel, z: f64) -> f64 {
    k.eval(z)
}

/// Numerical check of the three properties the frequency-localized estimate
/// needs from a kernel: oddness, a uniform bound and an `L^1` bound on the
/// derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmissibilityReport {
    pub odd: bool,
    pub bound: f64,
    pub derivative_l1: f64,
    /// The derivative is (numerically) a point mass: the `eps -> 0` limit.
    pub limit_case: bool,
}

impl AdmissibilityReport {
    pub fn passed(&self) -> bool {
        self.odd && self.bound.is_finite() && self.derivative_l1.is_finite()
    }
}

/// Samples `a` on a symmetric grid of `[-40 s, 40 s]`. The derivative's `L^1`
/// norm is the total variation of the samples.
pub fn check_admissibility(a: impl Fn(f64) -> f64, scale: f64) -> AdmissibilityReport {
    const HALF: i64 = 100_000;
    let h = 40.0 * scale / HALF as f64;
    let values: Vec<f64> = (-HALF..=HALF).map(|i| a(i as f64 * h)).collect();
    let bound = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let odd_defect = (0..=HALF as usize)
        .map(|i| (values[HALF as usize + i] + values[HALF as usize - i]).abs())
        .fold(0.0f64, f64::max);
    let jumps: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let tv: f64 = jumps.iter().sum();
    let max_jump = jumps.iter().fold(0.0f64, |m, v| m.max(*v));
    AdmissibilityReport {
        odd: odd_defect <= 1e-12 * bound.max(1.0),
        bound,
        derivative_l1: tv,
        limit_case: tv > 0.0 && max_jump > 0.25 * tv,
    }
}

pub fn kernel_admissibility(k: &MorawetzKernel) -> AdmissibilityReport {
    check_admissibility(|z| k.eval(z), k.scale())
}
