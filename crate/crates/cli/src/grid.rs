use serde::Serialize;

/// A parsed parameter grid together with the text it came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid {
    pub name: &'static str,
    pub spec: String,
    pub values: Vec<f64>,
}

impl Grid {
    /// Parse `start:stop:count` (uniform, endpoints included) or `a,b,c`.
    pub fn parse(name: &'static str, spec: &str) -> Result<Self, String> {
        let values = if spec.contains(':') {
            let parts: Vec<&str> = spec.split(':').collect();
            if parts.len() != 3 {
                return Err(format!("{name} grid '{spec}' must be start:stop:count"));
            }
            let start = number(parts[0], spec)?;
            let stop = number(parts[1], spec)?;
            let count: usize = parts[2]
                .trim()
                .parse()
                .map_err(|_| format!("{name} grid '{spec}': count must be an integer"))?;
            if count < 2 {
                return Err(format!("{name} grid '{spec}': count must be at least 2"));
            }
            if !(start < stop) {
                return Err(format!("{name} grid '{spec}': start must be below stop"));
            }
            let mut v: Vec<f64> = (0..count)
                .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
                .collect();
            v[count - 1] = stop;
            v
        } else {
            let v = spec.split(',').map(|t| number(t, spec)).collect::<Result<Vec<f64>, String>>()?;
            if v.len() < 2 {
                return Err(format!("{name} grid '{spec}' needs at least 2 values"));
            }
            if !v.windows(2).all(|w| w[0] < w[1]) {
                return Err(format!("{name} grid '{spec}' must be strictly increasing"));
            }
            v
        };
        Ok(Self { name, spec: spec.to_string(), values })
    }

    /// Require every value to lie strictly inside `(lo, hi)`.
    pub fn require_inside(&self, lo: f64, hi: f64) -> Result<(), String> {
        match self.values.iter().find(|&&v| !(v > lo && v < hi)) {
            Some(v) => Err(format!("{} grid '{}': value {v} outside ({lo}, {hi})", self.name, self.spec)),
            None => Ok(()),
        }
    }
}

fn number(t: &str, spec: &str) -> Result<f64, String> {
    let v: f64 = t.trim().parse().map_err(|_| format!("grid '{spec}': '{t}' is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("grid '{spec}': '{t}' is not finite"))
    }
}
