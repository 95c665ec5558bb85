use std::fmt;

use crate::error::{ensure, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Tanh,
    /// `max(z, 0)^k` with `k >= 2`. At `z == 0` the one-sided derivatives from
    /// the right are used.
    ReluPow(u32),
}

impl Activation {
    /// `(σ, σ', σ'', σ''')` at `z`.
    #[inline]
    pub fn derivatives(self, z: f64) -> [f64; 4] {
        match self {
            Activation::Tanh => {
                let s = z.tanh();
                let d1 = 1.0 - s * s;
                let d2 = -2.0 * s * d1;
                let d3 = d1 * (4.0 * s * s - 2.0 * d1);
                [s, d1, d2, d3]
            }
            Activation::ReluPow(k) => {
                if z < 0.0 {
                    return [0.0; 4];
                }
                let kf = k as f64;
                let ki = k as i32;
                let v = z.powi(ki);
                let d1 = kf * z.powi(ki - 1);
                let d2 = kf * (kf - 1.0) * z.powi(ki - 2);
                let d3 = if k >= 3 {
                    kf * (kf - 1.0) * (kf - 2.0) * z.powi(ki - 3)
                } else {
                    0.0
                };
                [v, d1, d2, d3]
            }
        }
    }

    #[inline]
    pub fn value(self, z: f64) -> f64 {
        match self {
            Activation::Tanh => z.tanh(),
            Activation::ReluPow(k) => {
                if z < 0.0 {
                    0.0
                } else {
                    z.powi(k as i32)
                }
            }
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim().to_ascii_lowercase();
        if s == "tanh" {
            return Some(Activation::Tanh);
        }
        let k = s.strip_prefix("relu^").or_else(|| s.strip_prefix("relupow"))?;
        let k: u32 = k.trim().parse().ok()?;
        (k >= 2).then_some(Activation::ReluPow(k))
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Activation::Tanh => write!(f, "tanh"),
            Activation::ReluPow(k) => write!(f, "relu^{k}"),
        }
    }
}

/// Layer widths `d_1, ..., d_{L+1}` of a scalar-output network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Architecture {
    widths: Vec<usize>,
    activation: Activation,
}

impl Architecture {
    pub fn new(widths: Vec<usize>, activation: Activation) -> Result<Self> {
        ensure!(
            widths.len() >= 3,
            "architecture needs input, at least one hidden layer and output, got {widths:?}"
        );
        ensure!(
            widths.iter().all(|&w| w >= 1),
            "layer widths must be positive: {widths:?}"
        );
        ensure!(*widths.last().unwrap() == 1, "output width must be 1, got {widths:?}");
        if let Activation::ReluPow(k) = activation {
            ensure!(k >= 2, "ReLU^k needs k >= 2 for second derivatives, got k = {k}");
        }
        Ok(Self { widths, activation })
    }

    /// `input_dim -> hidden x depth -> 1`.
    pub fn mlp(input_dim: usize, hidden: usize, depth: usize, activation: Activation) -> Result<Self> {
        let mut widths = vec![input_dim];
        widths.extend(std::iter::repeat_n(hidden, depth));
        widths.push(1);
        Self::new(widths, activation)
    }

    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn input_dim(&self) -> usize {
        self.widths[0]
    }

    /// Number of affine maps `C_1, ..., C_L`.
    pub fn num_layers(&self) -> usize {
        self.widths.len() - 1
    }

    /// `Σ_k d_{k+1} (d_k + 1)`.
    pub fn param_count(&self) -> usize {
        self.widths.windows(2).map(|w| w[1] * (w[0] + 1)).sum()
    }

    /// The descriptor line used in checkpoint files.
    pub fn descriptor(&self) -> String {
        let widths: Vec<String> = self.widths.iter().map(|w| w.to_string()).collect();
        format!("arch: {}; activation: {}", widths.join(","), self.activation)
    }

    pub fn parse_descriptor(line: &str) -> Result<Self> {
        let bad = || crate::error::contract(format!("malformed architecture descriptor `{line}`"));
        let rest = line.trim().strip_prefix("arch:").ok_or_else(bad)?;
        let (widths, act) = rest.split_once(';').ok_or_else(bad)?;
        let widths = widths
            .split(',')
            .map(|w| w.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| bad())?;
        let act = act.trim().strip_prefix("activation:").ok_or_else(bad)?;
        let activation = Activation::parse(act).ok_or_else(bad)?;
        Self::new(widths, activation)
    }
}
