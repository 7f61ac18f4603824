use super::data::TomographyData;
use super::param::TriangularParam;

/// Lower clamp applied to traces before taking logarithms.
pub const TRACE_FLOOR: f64 = 1e-300;

/// L(T) = Σ_μ n_μ ln q_μ − N·Tr(T†T), with
/// q_μ = Tr(T†T P_μ)·Tr(T†T)/Tr(T†T S̄) and S̄ the projector sum scaled to
/// trace 4.
///
/// When the projectors sum to a multiple of the identity, q_μ reduces to
/// Tr(T†T P_μ). In general the correction keeps the maximum at the
/// multinomial estimate with Tr(T†T) = 1. Settings with zero counts do not
/// contribute. Returns −∞ for T = 0.
pub fn log_likelihood(param: &TriangularParam, data: &TomographyData) -> f64 {
    let a = param.norm_sqr();
    if !(a > 0.0) {
        return f64::NEG_INFINITY;
    }
    let mut acc = 0.0;
    let mut sum = 0.0;
    for (v, &n) in data.vectors().iter().zip(data.counts()) {
        let q = param.quadratic_form(v);
        sum += q;
        if n > 0.0 {
            acc += n * q.max(TRACE_FLOOR).ln();
        }
    }
    let n_total = data.total();
    let s_bar = (data.sum_scale() * sum).max(TRACE_FLOOR);
    acc + n_total * (a.ln() - s_bar.ln()) - n_total * a
}

/// Central finite-difference gradient of [`log_likelihood`].
pub fn likelihood_gradient(param: &TriangularParam, data: &TomographyData, h: f64) -> [f64; 16] {
    std::array::from_fn(|i| {
        let mut up = *param;
        let mut down = *param;
        up.t[i] += h;
        down.t[i] -= h;
        (log_likelihood(&up, data) - log_likelihood(&down, data)) / (2.0 * h)
    })
}
