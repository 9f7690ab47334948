use ndarray::{Array1, Array2, ArrayView2, ArrayViewMut2};
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::math::{add_outer, sigmoid_vec, softmax};
use crate::params::{matrix_view, vector_view, vector_view_mut, Tensors};

/// Softmax output index holding the link probability.
pub(crate) const LINK: usize = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct RelationParameters {
    /// width × integration
    pub w_r: Array2<f64>,
    /// width × integration
    pub u_r: Array2<f64>,
    pub b_r: Array1<f64>,
    /// integration × 2
    pub w_p: Array2<f64>,
    pub b_p: Array1<f64>,
}

impl RelationParameters {
    pub fn zeros(width: usize, integration: usize) -> Self {
        RelationParameters {
            w_r: Array2::zeros((width, integration)),
            u_r: Array2::zeros((width, integration)),
            b_r: Array1::zeros(integration),
            w_p: Array2::zeros((integration, 2)),
            b_p: Array1::zeros(2),
        }
    }

    /// Weights uniform in ±1/√fan_in, biases zero.
    pub fn random(width: usize, integration: usize, rng: &mut crate::rng::Rng) -> Self {
        let mut p = Self::zeros(width, integration);
        let a = 1.0 / (width as f64).sqrt();
        p.w_r.mapv_inplace(|_| rng.random_range(-a..=a));
        p.u_r.mapv_inplace(|_| rng.random_range(-a..=a));
        let a = 1.0 / (integration as f64).sqrt();
        p.w_p.mapv_inplace(|_| rng.random_range(-a..=a));
        p
    }

    pub fn width(&self) -> usize {
        self.w_r.nrows()
    }

    pub fn integration(&self) -> usize {
        self.w_r.ncols()
    }

    fn check(&self) -> Result<()> {
        let (w, d) = self.w_r.dim();
        if self.u_r.dim() != (w, d) || self.b_r.len() != d || self.w_p.dim() != (d, 2) || self.b_p.len() != 2 {
            return Err(Error::Shape("relation parameters do not conform".into()));
        }
        Ok(())
    }
}

impl Tensors for RelationParameters {
    fn tensors(&self) -> Vec<(String, ArrayView2<'_, f64>)> {
        vec![
            matrix_view("relation.Wr".into(), &self.w_r),
            matrix_view("relation.Ur".into(), &self.u_r),
            vector_view("relation.br".into(), &self.b_r),
            matrix_view("relation.Wp".into(), &self.w_p),
            vector_view("relation.bp".into(), &self.b_p),
        ]
    }

    fn tensors_mut(&mut self) -> Vec<ArrayViewMut2<'_, f64>> {
        vec![
            self.w_r.view_mut(),
            self.u_r.view_mut(),
            vector_view_mut(&mut self.b_r),
            self.w_p.view_mut(),
            vector_view_mut(&mut self.b_p),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkPrediction {
    pub p_link: f64,
    pub p_nolink: f64,
}

impl LinkPrediction {
    /// Probability assigned to the given class.
    pub fn prob(&self, link: bool) -> f64 {
        if link {
            self.p_link
        } else {
            self.p_nolink
        }
    }

    pub fn is_link(&self) -> bool {
        self.p_link > self.p_nolink
    }
}

#[derive(Debug, Clone)]
pub struct RelationCache {
    pub vs: Array1<f64>,
    pub vt: Array1<f64>,
    pub pmul: Array1<f64>,
    pub sub: Array1<f64>,
    pub r: Array1<f64>,
    pub probs: Array1<f64>,
}

impl RelationCache {
    pub fn prediction(&self) -> LinkPrediction {
        LinkPrediction {
            p_link: self.probs[LINK],
            p_nolink: self.probs[1 - LINK],
        }
    }
}

pub(crate) fn relation_forward(rel: &RelationParameters, vs: &Array1<f64>, vt: &Array1<f64>) -> Result<RelationCache> {
    rel.check()?;
    if vs.len() != rel.width() || vt.len() != rel.width() {
        return Err(Error::Shape(format!(
            "semantic vectors of width {} and {}, relation expects {}",
            vs.len(),
            vt.len(),
            rel.width()
        )));
    }
    let pmul = vs * vt;
    let sub = (vs - vt).mapv(f64::abs);
    let r = sigmoid_vec(&(pmul.dot(&rel.w_r) + sub.dot(&rel.u_r) + &rel.b_r));
    let probs = softmax((r.dot(&rel.w_p) + &rel.b_p).view());
    Ok(RelationCache {
        vs: vs.clone(),
        vt: vt.clone(),
        pmul,
        sub,
        r,
        probs,
    })
}

/// Link probability of a pair of semantic vectors.
pub fn relation_head(rel: &RelationParameters, vs: &Array1<f64>, vt: &Array1<f64>) -> Result<LinkPrediction> {
    relation_forward(rel, vs, vt).map(|c| c.prediction())
}

/// Gradient of `scale · -ln P(label)` through the relation layers.
/// Accumulates into `grad`, returns (dv_s, dv_t). The subgradient of |x| at
/// 0 is taken as 0.
pub(crate) fn relation_backward(
    rel: &RelationParameters,
    grad: &mut RelationParameters,
    cache: &RelationCache,
    label: bool,
    scale: f64,
) -> (Array1<f64>, Array1<f64>) {
    let mut dz = cache.probs.clone();
    dz[if label { LINK } else { 1 - LINK }] -= 1.0;
    dz *= scale;

    add_outer(&mut grad.w_p, cache.r.view(), dz.view());
    grad.b_p += &dz;
    let dr = rel.w_p.dot(&dz);
    let da = dr * &cache.r * &(1.0 - &cache.r);
    add_outer(&mut grad.w_r, cache.pmul.view(), da.view());
    add_outer(&mut grad.u_r, cache.sub.view(), da.view());
    grad.b_r += &da;
    let dpmul = rel.w_r.dot(&da);
    let dsub = rel.u_r.dot(&da);
    let sign = (&cache.vs - &cache.vt).mapv(|d| if d > 0.0 { 1.0 } else if d < 0.0 { -1.0 } else { 0.0 });
    let dsub_signed = &dsub * &sign;
    let dvs = &dpmul * &cache.vt + &dsub_signed;
    let dvt = &dpmul * &cache.vs - &dsub_signed;
    (dvs, dvt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn equal_inputs_zero_difference() {
        let rel = RelationParameters::zeros(3, 2);
        let v = array![0.3, -0.2, 0.9];
        let c = relation_forward(&rel, &v, &v).unwrap();
        assert_eq!(c.sub, array![0.0, 0.0, 0.0]);
    }

    #[test]
    fn zero_parameters_are_uninformative() {
        let rel = RelationParameters::zeros(2, 4);
        let c = relation_forward(&rel, &array![1.0, 2.0], &array![-3.0, 0.5]).unwrap();
        assert_eq!(c.r, Array1::from_elem(4, 0.5));
        let p = c.prediction();
        assert_eq!((p.p_link, p.p_nolink), (0.5, 0.5));
    }

    #[test]
    fn scalar_worked_case() {
        let mut rel = RelationParameters::zeros(1, 1);
        rel.w_r.fill(1.0);
        rel.u_r.fill(1.0);
        rel.w_p = array![[1.0, -1.0]];
        let c = relation_forward(&rel, &array![2.0], &array![3.0]).unwrap();
        assert_eq!(c.pmul[0], 6.0);
        assert_eq!(c.sub[0], 1.0);
        let r = 1.0 / (1.0 + (-7.0f64).exp());
        assert!((c.r[0] - r).abs() < 1e-15);
        // logits (r, -r); link is index 1
        let p_link = (-r).exp() / (r.exp() + (-r).exp());
        let p = c.prediction();
        assert!((p.p_link - p_link).abs() < 1e-15);
        assert!((p.p_link - 0.119394).abs() < 1e-6);
        assert!((p.p_link + p.p_nolink - 1.0).abs() < 1e-12);
    }

    #[test]
    fn width_mismatch() {
        let rel = RelationParameters::zeros(2, 1);
        assert!(matches!(relation_head(&rel, &array![1.0], &array![1.0]), Err(Error::Shape(_))));
    }
}
