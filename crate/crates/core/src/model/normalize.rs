use super::ModelError;

/// Fits raw 2D coordinates into `[-1, 1]²` with a single similarity transform.
///
/// The bounding box is centered on the origin and scaled uniformly so its
/// longer side spans `[-1, 1]`. When every point coincides they all map to
/// the origin.
pub fn normalize_projection(raw: &[[f64; 2]]) -> Result<Vec<[f32; 2]>, ModelError> {
    if raw.is_empty() {
        return Err(ModelError::Input("cannot normalize an empty projection".into()));
    }
    if raw.iter().flatten().any(|v| !v.is_finite()) {
        return Err(ModelError::Input("projection contains non-finite coordinates".into()));
    }
    let fit = Fit::from_points(raw.iter().map(|p| (p[0], p[1])));
    Ok(raw
        .iter()
        .map(|p| {
            let (x, y) = fit.apply(p[0], p[1]);
            [x as f32, y as f32]
        })
        .collect())
}

/// In-place variant for row-major float32 tables with 2 or 3 columns.
/// Only x and y are transformed; z is left untouched.
pub fn normalize_table_xy(coords: &mut [f32], dims: usize) -> Result<(), ModelError> {
    assert!(dims == 2 || dims == 3, "dims must be 2 or 3");
    if coords.is_empty() {
        return Err(ModelError::Input("cannot normalize an empty projection".into()));
    }
    if coords.iter().any(|v| !v.is_finite()) {
        return Err(ModelError::Input("projection contains non-finite coordinates".into()));
    }
    let fit = Fit::from_points(
        coords
            .chunks_exact(dims)
            .map(|r| (f64::from(r[0]), f64::from(r[1]))),
    );
    for row in coords.chunks_exact_mut(dims) {
        let (x, y) = fit.apply(f64::from(row[0]), f64::from(row[1]));
        row[0] = x as f32;
        row[1] = y as f32;
    }
    Ok(())
}

struct Fit {
    cx: f64,
    cy: f64,
    half: f64,
}

impl Fit {
    fn from_points(points: impl Iterator<Item = (f64, f64)>) -> Self {
        let (mut min_x, mut max_x) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut min_y, mut max_y) = (f64::INFINITY, f64::NEG_INFINITY);
        for (x, y) in points {
            min_x = min_x.min(x);
            max_x = max_x.max(x);
            min_y = min_y.min(y);
            max_y = max_y.max(y);
        }
        Fit {
            cx: (min_x + max_x) / 2.0,
            cy: (min_y + max_y) / 2.0,
            half: ((max_x - min_x) / 2.0).max((max_y - min_y) / 2.0),
        }
    }

    fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        if self.half == 0.0 {
            (0.0, 0.0)
        } else {
            ((x - self.cx) / self.half, (y - self.cy) / self.half)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn two_points() {
        let out = normalize_projection(&[[0.0, 0.0], [10.0, 5.0]]).unwrap();
        assert_eq!(out, vec![[-1.0, -0.5], [1.0, 0.5]]);
    }

    #[test]
    fn single_point_maps_to_origin() {
        assert_eq!(normalize_projection(&[[3.0, 3.0]]).unwrap(), vec![[0.0, 0.0]]);
    }

    #[test]
    fn identical_points_map_to_origin() {
        let out = normalize_projection(&[[2.0, -1.0]; 4]).unwrap();
        assert!(out.iter().all(|p| *p == [0.0, 0.0]));
    }

    #[test]
    fn rejects_empty_and_non_finite() {
        assert!(normalize_projection(&[]).is_err());
        assert!(normalize_projection(&[[f64::NAN, 0.0]]).is_err());
    }

    #[test]
    fn z_column_untouched() {
        let mut t = vec![0.0, 0.0, 7.0, 4.0, 2.0, -3.0];
        normalize_table_xy(&mut t, 3).unwrap();
        assert_eq!(t, vec![-1.0, -0.5, 7.0, 1.0, 0.5, -3.0]);
    }

    fn random_points() -> impl Strategy<Value = Vec<[f64; 2]>> {
        prop::collection::vec(
            (-1e3f64..1e3, -1e3f64..1e3).prop_map(|(x, y)| [x, y]),
            2..100,
        )
    }

    proptest! {
        #[test]
        fn fits_unit_box_and_preserves_ratios(raw in random_points()) {
            let out = normalize_projection(&raw).unwrap();
            let extent = out.iter().flat_map(|p| [p[0].abs(), p[1].abs()]).fold(0f32, f32::max);
            prop_assert!((extent - 1.0).abs() <= 1e-6 || extent == 0.0);

            let dist = |a: [f64; 2], b: [f64; 2]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
            let widen = |p: [f32; 2]| [f64::from(p[0]), f64::from(p[1])];
            let far = (1..raw.len())
                .max_by(|&a, &b| dist(raw[0], raw[a]).total_cmp(&dist(raw[0], raw[b])))
                .unwrap();
            let (r0, n0) = (dist(raw[0], raw[far]), dist(widen(out[0]), widen(out[far])));
            if r0 > 0.0 {
                for i in 1..raw.len() {
                    let r = dist(raw[0], raw[i]) / r0;
                    let n = dist(widen(out[0]), widen(out[i])) / n0;
                    prop_assert!((r - n).abs() <= 1e-6, "ratio {r} vs {n}");
                }
            }
        }

        #[test]
        fn idempotent(raw in random_points()) {
            let once = normalize_projection(&raw).unwrap();
            let widened: Vec<[f64; 2]> = once.iter().map(|p| [f64::from(p[0]), f64::from(p[1])]).collect();
            let twice = normalize_projection(&widened).unwrap();
            for (a, b) in once.iter().zip(&twice) {
                prop_assert!((a[0] - b[0]).abs() <= 1e-7 && (a[1] - b[1]).abs() <= 1e-7);
            }
        }
    }
}
