use std::sync::Arc;

use crate::expr::VarList;

use super::TensorError;

#[derive(Debug)]
struct ChartInner {
    coords: Vec<String>,
    params: Vec<String>,
    vars: VarList,
}

/// Coordinate names plus parameters that are held constant under differentiation.
#[derive(Clone, Debug)]
pub struct Chart(Arc<ChartInner>);

impl Chart {
    pub fn new<C, P>(coords: C, params: P) -> Result<Self, TensorError>
    where
        C: IntoIterator,
        C::Item: Into<String>,
        P: IntoIterator,
        P::Item: Into<String>,
    {
        let coords: Vec<String> = coords.into_iter().map(Into::into).collect();
        let params: Vec<String> = params.into_iter().map(Into::into).collect();
        if coords.is_empty() {
            return Err(TensorError::Dimension("chart needs at least one coordinate".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for n in coords.iter().chain(params.iter()) {
            if !seen.insert(n.as_str()) {
                return Err(TensorError::DuplicateName(n.clone()));
            }
        }
        let vars = VarList::new(coords.iter().chain(params.iter()).cloned());
        Ok(Chart(Arc::new(ChartInner { coords, params, vars })))
    }

    pub fn dim(&self) -> usize {
        self.0.coords.len()
    }

    pub fn coords(&self) -> &[String] {
        &self.0.coords
    }

    pub fn params(&self) -> &[String] {
        &self.0.params
    }

    /// Coordinates followed by parameters; the variable order of every component.
    pub fn vars(&self) -> &VarList {
        &self.0.vars
    }

    pub fn coord_index(&self, name: &str) -> Option<usize> {
        self.0.coords.iter().position(|c| c == name)
    }
}

impl PartialEq for Chart {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.coords == other.0.coords && self.0.params == other.0.params)
    }
}

impl Eq for Chart {}
