use crate::geometry::{wrap_angle, Vec2};

/// Converts a single-integrator velocity into unicycle commands `(v, ω)`:
/// `δ = wrap(atan2(u) − θ)`, `ω = δ / L`, `v = ‖u‖·max(0, cos δ)`.
/// A zero command yields `(0, 0)`.
pub fn si_to_unicycle(u: Vec2, heading: f64, l: f64) -> (f64, f64) {
    debug_assert!(l > 0.0);
    let speed = u.norm();
    if speed == 0.0 {
        return (0.0, 0.0);
    }
    let delta = wrap_angle(u.y.atan2(u.x) - heading);
    (speed * delta.cos().max(0.0), delta / l)
}

/// Explicit-Euler unicycle update; position uses the heading at the start
/// of the step.
pub fn integrate_unicycle(position: Vec2, heading: f64, v: f64, omega: f64, dt: f64) -> (Vec2, f64) {
    (position + Vec2::from_angle(heading) * (v * dt), wrap_angle(heading + omega * dt))
}
