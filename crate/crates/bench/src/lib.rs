//! Shared inputs for the kernel benchmarks in `benches/`.

use painleve_core::dpmaps::ErcgParams;
use painleve_core::elliptic::Modulus;
use painleve_core::weyl::{FieldState, ParamTriple};
use painleve_core::{PrecisionContext, Scalar};

pub fn ctx(bits: u32) -> PrecisionContext {
    PrecisionContext::new(bits).expect("bits above the minimum")
}

pub fn exact(n: i64, d: i64) -> Scalar {
    Scalar::exact(n, d).expect("nonzero denominator")
}

/// The elliptic map at modulus 0.6 with the CLI's default shifts.
pub fn ercg_params(ctx: &PrecisionContext) -> ErcgParams {
    ErcgParams {
        modulus: Modulus::new(ctx.float(0.6)).expect("modulus in range"),
        gamma_e: ctx.float(0.17),
        gamma_o: ctx.float(0.31),
        omega: ctx.float(0.4),
    }
}

/// A pole-free exact field state with generic parameters.
pub fn weyl_state() -> (FieldState, ParamTriple) {
    (FieldState::new(exact(2, 3), exact(-5, 7), exact(11, 5)), ParamTriple::normalized(exact(1, 3), exact(2, 9)))
}
