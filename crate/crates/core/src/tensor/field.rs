use std::collections::BTreeMap;

use crate::expr::RationalExpr;

use super::{Chart, MetricField, TensorError};

/// Multi-index: contravariant indices first, then covariant ones.
pub type Index = Vec<usize>;

/// A valence-(r, s) tensor field. Only nonzero components are stored;
/// every absent component is exactly zero.
#[derive(Clone, Debug)]
pub struct TensorField {
    chart: Chart,
    upper: usize,
    lower: usize,
    comps: BTreeMap<Index, RationalExpr>,
}

/// Outcome of an exact vanishing test.
#[derive(Clone, Debug)]
pub struct ZeroTest {
    pub zero: bool,
    /// First nonzero component in index order, when not zero.
    pub witness: Option<(Index, RationalExpr)>,
}

impl TensorField {
    pub fn zero(chart: &Chart, upper: usize, lower: usize) -> Self {
        TensorField {
            chart: chart.clone(),
            upper,
            lower,
            comps: BTreeMap::new(),
        }
    }

    /// Fills every component from `f`, enumerating all `n^(r+s)` indices.
    pub fn from_fn(
        chart: &Chart,
        upper: usize,
        lower: usize,
        mut f: impl FnMut(&[usize]) -> RationalExpr,
    ) -> Self {
        let mut t = Self::zero(chart, upper, lower);
        for idx in all_indices(chart.dim(), upper + lower) {
            let v = f(&idx);
            t.set(idx, v);
        }
        t
    }

    pub(crate) fn from_map(chart: &Chart, upper: usize, lower: usize, comps: BTreeMap<Index, RationalExpr>) -> Self {
        let mut t = Self::zero(chart, upper, lower);
        t.comps = comps.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        t
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn valence(&self) -> (usize, usize) {
        (self.upper, self.lower)
    }

    pub fn rank(&self) -> usize {
        self.upper + self.lower
    }

    /// Component at `idx` (zero when absent).
    pub fn get(&self, idx: &[usize]) -> RationalExpr {
        self.comps
            .get(idx)
            .cloned()
            .unwrap_or_else(|| RationalExpr::zero(self.chart.vars()))
    }

    pub fn get_ref(&self, idx: &[usize]) -> Option<&RationalExpr> {
        self.comps.get(idx)
    }

    pub fn set(&mut self, idx: Index, v: RationalExpr) {
        assert_eq!(idx.len(), self.rank(), "index length");
        if v.is_zero() {
            self.comps.remove(&idx);
        } else {
            self.comps.insert(idx, v);
        }
    }

    /// Nonzero components in index order.
    pub fn nonzero(&self) -> impl Iterator<Item = (&Index, &RationalExpr)> {
        self.comps.iter()
    }

    pub fn nnz(&self) -> usize {
        self.comps.len()
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn zero_test(&self) -> ZeroTest {
        match self.comps.iter().next() {
            None => ZeroTest { zero: true, witness: None },
            Some((i, v)) => ZeroTest {
                zero: false,
                witness: Some((i.clone(), v.clone())),
            },
        }
    }

    /// Formats `idx` with coordinate names as `upper; lower`, e.g. `v; u,x,u`.
    pub fn index_label(&self, idx: &[usize]) -> String {
        let names = self.chart.coords();
        let up: Vec<&str> = idx[..self.upper].iter().map(|&i| names[i].as_str()).collect();
        let lo: Vec<&str> = idx[self.upper..].iter().map(|&i| names[i].as_str()).collect();
        format!("{}; {}", up.join(","), lo.join(","))
    }

    fn same_shape(&self, other: &Self) -> Result<(), TensorError> {
        if self.chart != other.chart {
            return Err(TensorError::ChartMismatch);
        }
        if self.valence() != other.valence() {
            return Err(TensorError::Dimension("valence mismatch".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, TensorError> {
        self.same_shape(other)?;
        let mut out = self.clone();
        for (i, v) in &other.comps {
            let s = out.get(i).add_expr(v);
            out.set(i.clone(), s);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, TensorError> {
        self.same_shape(other)?;
        let mut out = self.clone();
        for (i, v) in &other.comps {
            let s = out.get(i).sub_expr(v);
            out.set(i.clone(), s);
        }
        Ok(out)
    }

    /// Exact component-wise equality.
    pub fn equals(&self, other: &Self) -> bool {
        self.sub(other).is_ok_and(|d| d.is_zero())
    }

    /// Swaps two covariant slots: result component `[.., b_q1 .. b_q2 ..] = t[.. b_q2 .. b_q1 ..]`.
    pub fn swap_lower(&self, q1: usize, q2: usize) -> Result<Self, TensorError> {
        if q1 >= self.lower || q2 >= self.lower {
            return Err(TensorError::InvalidSlot(format!("lower slots {q1}, {q2}")));
        }
        let (a, b) = (self.upper + q1, self.upper + q2);
        let mut out = Self::zero(&self.chart, self.upper, self.lower);
        for (i, v) in &self.comps {
            let mut j = i.clone();
            j.swap(a, b);
            out.comps.insert(j, v.clone());
        }
        Ok(out)
    }

    /// `g_{ae} t^{..e..}`: the upper slot `p` becomes the first covariant slot.
    pub fn lower_index(&self, m: &MetricField, p: usize) -> Result<Self, TensorError> {
        if self.chart != *m.chart() {
            return Err(TensorError::ChartMismatch);
        }
        if p >= self.upper {
            return Err(TensorError::InvalidSlot(format!("upper slot {p}")));
        }
        let n = self.chart.dim();
        let mut acc: BTreeMap<Index, RationalExpr> = BTreeMap::new();
        for (idx, v) in &self.comps {
            let e = idx[p];
            for a in 0..n {
                let g = m.component(a, e);
                if g.is_zero() {
                    continue;
                }
                let mut key: Index = idx[..self.upper].iter().enumerate().filter(|(k, _)| *k != p).map(|(_, &x)| x).collect();
                key.push(a);
                key.extend_from_slice(&idx[self.upper..]);
                accumulate(&mut acc, key, g.mul_expr(v));
            }
        }
        Ok(Self::from_map(&self.chart, self.upper - 1, self.lower + 1, acc))
    }

    /// `g^{ae} t_{..e..}`: the lower slot `q` becomes the first contravariant slot.
    pub fn raise_index(&self, m: &MetricField, q: usize) -> Result<Self, TensorError> {
        if self.chart != *m.chart() {
            return Err(TensorError::ChartMismatch);
        }
        if q >= self.lower {
            return Err(TensorError::InvalidSlot(format!("lower slot {q}")));
        }
        let inv = m.inverse();
        let n = self.chart.dim();
        let mut acc: BTreeMap<Index, RationalExpr> = BTreeMap::new();
        for (idx, v) in &self.comps {
            let e = idx[self.upper + q];
            for a in 0..n {
                let Some(h) = inv.get_ref(&[a, e]) else { continue };
                let mut key: Index = vec![a];
                key.extend_from_slice(&idx[..self.upper]);
                key.extend(
                    idx[self.upper..]
                        .iter()
                        .enumerate()
                        .filter(|(k, _)| *k != q)
                        .map(|(_, &x)| x),
                );
                accumulate(&mut acc, key, h.mul_expr(v));
            }
        }
        Ok(Self::from_map(&self.chart, self.upper + 1, self.lower - 1, acc))
    }

    /// Trace over upper slot `p` and lower slot `q`.
    pub fn contract(&self, p: usize, q: usize) -> Result<Self, TensorError> {
        if p >= self.upper || q >= self.lower {
            return Err(TensorError::InvalidSlot(format!("contract upper {p} with lower {q}")));
        }
        let mut acc: BTreeMap<Index, RationalExpr> = BTreeMap::new();
        for (idx, v) in &self.comps {
            if idx[p] != idx[self.upper + q] {
                continue;
            }
            let key: Index = idx
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != p && *k != self.upper + q)
                .map(|(_, &x)| x)
                .collect();
            accumulate(&mut acc, key, v.clone());
        }
        Ok(Self::from_map(&self.chart, self.upper - 1, self.lower - 1, acc))
    }

    /// Outer product: uppers of `self`, uppers of `other`, lowers of `self`, lowers of `other`.
    pub fn product(&self, other: &Self) -> Result<Self, TensorError> {
        if self.chart != other.chart {
            return Err(TensorError::ChartMismatch);
        }
        let mut out = Self::zero(&self.chart, self.upper + other.upper, self.lower + other.lower);
        for (i, a) in &self.comps {
            for (j, b) in &other.comps {
                let mut key = i[..self.upper].to_vec();
                key.extend_from_slice(&j[..other.upper]);
                key.extend_from_slice(&i[self.upper..]);
                key.extend_from_slice(&j[other.upper..]);
                out.set(key, a.mul_expr(b));
            }
        }
        Ok(out)
    }
}

pub(crate) fn accumulate(acc: &mut BTreeMap<Index, RationalExpr>, key: Index, v: RationalExpr) {
    if v.is_zero() {
        return;
    }
    match acc.entry(key) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(v);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            let s = e.get().add_expr(&v);
            *e.get_mut() = s;
        }
    }
}

/// All multi-indices of length `rank` over `0..n`, in lexicographic order.
pub(crate) fn all_indices(n: usize, rank: usize) -> impl Iterator<Item = Index> {
    let total = n.pow(rank as u32);
    (0..total).map(move |mut k| {
        let mut idx = vec![0; rank];
        for slot in (0..rank).rev() {
            idx[slot] = k % n;
            k /= n;
        }
        idx
    })
}
