use crate::norms::Norm;
use crate::ofl::{MetricSpace, OflError};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub enum FacilityCosts<T> {
    Uniform(T),
    /// One cost per metric point; entries of non-openable points are ignored.
    PerPoint(Vec<T>),
}

/// Metric, request sequence, facility costs and connection norm.
///
/// A point is openable when it is a request location or listed in
/// `extra_sites`.
#[derive(Debug, Clone)]
pub struct OflInstance<T> {
    metric: MetricSpace<T>,
    requests: Vec<usize>,
    costs: FacilityCosts<T>,
    openable: Vec<bool>,
    norm: Norm<T>,
}

impl<T: Scalar> OflInstance<T> {
    pub fn new(
        metric: MetricSpace<T>,
        requests: Vec<usize>,
        costs: FacilityCosts<T>,
        extra_sites: &[usize],
        norm: Norm<T>,
    ) -> Result<Self, OflError> {
        let n_points = metric.len();
        if norm.dim() != requests.len() {
            return Err(OflError::InvalidInstance(format!(
                "norm has dimension {} but there are {} requests",
                norm.dim(),
                requests.len()
            )));
        }
        let mut openable = vec![false; n_points];
        for &q in requests.iter().chain(extra_sites) {
            if q >= n_points {
                return Err(OflError::InvalidInstance(format!(
                    "point {q} out of range for {n_points} points"
                )));
            }
            openable[q] = true;
        }
        match &costs {
            FacilityCosts::Uniform(f) => {
                if !(*f >= T::zero()) || f.is_infinite() {
                    return Err(OflError::InvalidCost {
                        index: 0,
                        value: f.to_f64_lossy(),
                    });
                }
            }
            FacilityCosts::PerPoint(c) => {
                if c.len() != n_points {
                    return Err(OflError::InvalidInstance(format!(
                        "{} per-point costs for {n_points} points",
                        c.len()
                    )));
                }
                if let Some((i, v)) = c.iter().enumerate().find(|(_, v)| !(**v >= T::zero()) || v.is_infinite()) {
                    return Err(OflError::InvalidCost {
                        index: i,
                        value: v.to_f64_lossy(),
                    });
                }
            }
        }
        Ok(Self {
            metric,
            requests,
            costs,
            openable,
            norm,
        })
    }

    pub fn metric(&self) -> &MetricSpace<T> {
        &self.metric
    }

    pub fn requests(&self) -> &[usize] {
        &self.requests
    }

    pub fn costs(&self) -> &FacilityCosts<T> {
        &self.costs
    }

    pub fn norm(&self) -> &Norm<T> {
        &self.norm
    }

    pub fn n_requests(&self) -> usize {
        self.requests.len()
    }

    pub fn is_openable(&self, q: usize) -> bool {
        self.openable[q]
    }

    pub fn openable(&self) -> Vec<usize> {
        (0..self.openable.len()).filter(|&q| self.openable[q]).collect()
    }

    /// Openable points that are not request locations.
    pub fn extra_sites(&self) -> Vec<usize> {
        let mut is_request = vec![false; self.openable.len()];
        for &r in &self.requests {
            is_request[r] = true;
        }
        self.openable().into_iter().filter(|&q| !is_request[q]).collect()
    }

    /// Original (unrounded) opening cost of `q`.
    pub fn cost(&self, q: usize) -> T {
        match &self.costs {
            FacilityCosts::Uniform(f) => *f,
            FacilityCosts::PerPoint(c) => c[q],
        }
    }

    pub fn uniform_cost(&self) -> Option<T> {
        match &self.costs {
            FacilityCosts::Uniform(f) => Some(*f),
            FacilityCosts::PerPoint(_) => None,
        }
    }

    /// Same instance with a different norm of the same dimension.
    pub fn with_norm(&self, norm: Norm<T>) -> Result<Self, OflError> {
        Self::new(
            self.metric.clone(),
            self.requests.clone(),
            self.costs.clone(),
            &self.extra_sites(),
            norm,
        )
    }

    /// Same instance with different facility costs.
    pub fn with_costs(&self, costs: FacilityCosts<T>) -> Result<Self, OflError> {
        Self::new(
            self.metric.clone(),
            self.requests.clone(),
            costs,
            &self.extra_sites(),
            self.norm.clone(),
        )
    }
}
