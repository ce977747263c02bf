//! Three-regime velocity-porosity transform.

/// Upper porosity of the matrix-supported regime.
pub const LOW_POROSITY: f64 = 0.37;
/// Lower porosity of the suspension regime.
pub const HIGH_POROSITY: f64 = 0.47;

fn matrix_supported(phi: f64, v_ma: f64, v_f: f64) -> f64 {
    (1.0 - phi) * (1.0 - phi) * v_ma + phi * v_f
}

/// Wood suspension velocity, written as `V_f / sqrt((rho / rho_f)(phi + (1 - phi) K_f / K_ma))`
/// so that `phi = 1` yields exactly `V_f`.
fn suspension(phi: f64, v_ma: f64, v_f: f64, rho_ma: f64, rho_f: f64) -> f64 {
    let rho = phi * rho_f + (1.0 - phi) * rho_ma;
    let k_ratio = (rho_f * v_f * v_f) / (rho_ma * v_ma * v_ma);
    v_f / libm::sqrt((rho / rho_f) * (phi + (1.0 - phi) * k_ratio))
}

/// P-wave velocity (km/s) for porosity `phi` of a rock with matrix velocity
/// `v_ma`, fluid velocity `v_f` and densities `rho_ma`, `rho_f`.
pub fn rhg_velocity(phi: f64, v_ma: f64, v_f: f64, rho_ma: f64, rho_f: f64) -> f64 {
    if phi < LOW_POROSITY {
        matrix_supported(phi, v_ma, v_f)
    } else if phi > HIGH_POROSITY {
        suspension(phi, v_ma, v_f, rho_ma, rho_f)
    } else {
        let v1 = matrix_supported(phi, v_ma, v_f);
        let v2 = suspension(phi, v_ma, v_f, rho_ma, rho_f);
        let width = HIGH_POROSITY - LOW_POROSITY;
        1.0 / ((phi - LOW_POROSITY) / (width * v2) + (HIGH_POROSITY - phi) / (width * v1))
    }
}

/// Mineral and fluid constants (km/s, g/cc).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RockConstants {
    pub v_quartz: f64,
    pub v_clay: f64,
    pub v_water: f64,
    pub v_hydrate: f64,
    pub rho_quartz: f64,
    pub rho_clay: f64,
    pub rho_water: f64,
    pub rho_hydrate: f64,
}

impl Default for RockConstants {
    fn default() -> Self {
        RockConstants {
            v_quartz: 5.94,
            v_clay: 3.41,
            v_water: 1.50,
            v_hydrate: 3.30,
            rho_quartz: 2.65,
            rho_clay: 2.58,
            rho_water: 1.03,
            rho_hydrate: 0.92,
        }
    }
}

impl RockConstants {
    /// Velocity of a sediment with porosity `phi`, clay share `vsh` of the
    /// solids and hydrate saturation `sh` of the pore space.
    ///
    /// Hydrate is load-bearing: it joins the matrix (time-average velocity,
    /// volume-average density of quartz, clay and hydrate) and only the
    /// water-filled porosity `phi (1 - sh)` enters the transform.
    pub fn sediment_velocity(&self, phi: f64, vsh: f64, sh: f64) -> f64 {
        let solids = 1.0 - phi;
        let hydrate = phi * sh;
        let matrix = solids + hydrate;
        if matrix <= 0.0 {
            return self.v_water;
        }
        let (fq, fc, fh) = (solids * (1.0 - vsh) / matrix, solids * vsh / matrix, hydrate / matrix);
        let v_ma = 1.0 / (fq / self.v_quartz + fc / self.v_clay + fh / self.v_hydrate);
        let rho_ma = fq * self.rho_quartz + fc * self.rho_clay + fh * self.rho_hydrate;
        rhg_velocity(phi * (1.0 - sh), v_ma, self.v_water, rho_ma, self.rho_water)
    }
}
