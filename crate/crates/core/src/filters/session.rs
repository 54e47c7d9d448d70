use super::{FilterError, RangeFilter, SelectionMask};
use crate::model::DimensionColumn;

/// Slider state for one client, caching one mask per dimension.
///
/// Moving a slider re-evaluates only that dimension and then re-ANDs the
/// cached masks; the other columns are not rescanned.
#[derive(Debug, Clone)]
pub struct FilterSession<'a> {
    columns: &'a [DimensionColumn],
    n: usize,
    slots: Vec<Option<(RangeFilter, SelectionMask)>>,
    combined: SelectionMask,
}

impl<'a> FilterSession<'a> {
    pub fn new(n: usize, columns: &'a [DimensionColumn]) -> Self {
        FilterSession {
            columns,
            n,
            slots: vec![None; columns.len()],
            combined: SelectionMask::full(n),
        }
    }

    /// Replaces the filter on `range.dimension` and returns the new mask.
    pub fn set_range(&mut self, range: RangeFilter) -> Result<&SelectionMask, FilterError> {
        range.validate()?;
        let slot = self
            .columns
            .iter()
            .position(|c| c.name == range.dimension)
            .ok_or_else(|| FilterError::UnknownDimension(range.dimension.clone()))?;
        if !matches!(&self.slots[slot], Some((r, _)) if *r == range) {
            let mask = range.evaluate(&self.columns[slot]);
            self.slots[slot] = Some((range, mask));
            self.recombine();
        }
        Ok(&self.combined)
    }

    pub fn clear(&mut self, dimension: &str) -> Result<&SelectionMask, FilterError> {
        let slot = self
            .columns
            .iter()
            .position(|c| c.name == dimension)
            .ok_or_else(|| FilterError::UnknownDimension(dimension.to_string()))?;
        if self.slots[slot].take().is_some() {
            self.recombine();
        }
        Ok(&self.combined)
    }

    pub fn ranges(&self) -> impl Iterator<Item = &RangeFilter> {
        self.slots.iter().flatten().map(|(r, _)| r)
    }

    pub fn mask(&self) -> &SelectionMask {
        &self.combined
    }

    fn recombine(&mut self) {
        let mut acc = SelectionMask::full(self.n);
        for (_, m) in self.slots.iter().flatten() {
            acc.and_assign(m);
        }
        self.combined = acc;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::apply_range_filters;

    #[test]
    fn matches_stateless_evaluation() {
        let cols = vec![
            DimensionColumn::from_values("a", (0..100).map(|i| i as f32).collect(), 10),
            DimensionColumn::from_values("b", (0..100).map(|i| ((i * 37) % 100) as f32).collect(), 10),
        ];
        let mut s = FilterSession::new(100, &cols);
        let fa = RangeFilter::new("a", 10.0, 60.0);
        let fb = RangeFilter::new("b", 0.0, 50.0);
        s.set_range(fa.clone()).unwrap();
        s.set_range(fb.clone()).unwrap();
        assert_eq!(s.mask(), &apply_range_filters(100, &cols, &[fa.clone(), fb.clone()]).unwrap());

        let fa2 = RangeFilter::new("a", 20.0, 30.0);
        s.set_range(fa2.clone()).unwrap();
        assert_eq!(s.mask(), &apply_range_filters(100, &cols, &[fa2, fb.clone()]).unwrap());

        s.clear("a").unwrap();
        assert_eq!(s.mask(), &apply_range_filters(100, &cols, &[fb]).unwrap());
        assert_eq!(s.ranges().count(), 1);
        assert!(s.set_range(RangeFilter::new("zzz", 0.0, 1.0)).is_err());
    }
}
