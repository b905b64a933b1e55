use super::VocabError;

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in descending order and the matching unit
/// eigenvectors (`vectors[k]` pairs with `values[k]`).
pub fn symmetric_eigen(matrix: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = matrix.len();
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let scale: f64 = a.iter().flatten().map(|x| x * x).sum::<f64>();

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off <= scale * 1e-32 || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (akp, akq) = (row[p], row[q]);
                    row[p] = c * akp - s * akq;
                    row[q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vkp, vkq) = (row[p], row[q]);
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j][j].total_cmp(&a[i][i]));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = order
        .iter()
        .map(|&i| (0..n).map(|k| v[k][i]).collect())
        .collect();
    (values, vectors)
}

/// Rows projected onto the leading principal axes.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    /// One row per input row, one column per component.
    pub coordinates: Vec<Vec<f64>>,
    /// Variance along each component (covariance eigenvalues).
    pub variances: Vec<f64>,
    /// Principal axes, one unit vector per component.
    pub axes: Vec<Vec<f64>>,
    /// Number of components with non-negligible variance.
    pub rank: usize,
}

impl Projection {
    pub fn is_degenerate(&self) -> bool {
        self.rank < self.coordinates.first().map_or(0, Vec::len)
    }

    pub fn to_csv(&self, labels: &[String]) -> String {
        let k = self.variances.len();
        let mut out = String::from("label");
        for c in 1..=k {
            out.push_str(&format!(",pc{c}"));
        }
        out.push('\n');
        for (l, row) in labels.iter().zip(&self.coordinates) {
            out.push_str(l);
            for x in row {
                out.push_str(&format!(",{x}"));
            }
            out.push('\n');
        }
        out
    }
}

/// PCA of `rows` (one observation per row) down to `components` axes.
///
/// Columns are centered by their means, the sample covariance is
/// eigen-decomposed, and each axis is signed so that its largest-magnitude
/// entry is positive. Axes beyond the numerical rank project to zero.
pub fn pca_project(rows: &[Vec<f64>], components: usize) -> Result<Projection, VocabError> {
    let n = rows.len();
    if n < components || components == 0 {
        return Err(VocabError::TooFew {
            need: components.max(1),
            got: n,
        });
    }
    let d = rows[0].len();
    if rows.iter().any(|r| r.len() != d) {
        return Err(VocabError::DegenerateMatrix("ragged rows".into()));
    }
    let means: Vec<f64> = (0..d)
        .map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n as f64)
        .collect();
    let centered: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| r.iter().zip(&means).map(|(x, m)| x - m).collect())
        .collect();
    let denom = (n.max(2) - 1) as f64;
    let mut cov = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in i..d {
            let s: f64 = centered.iter().map(|r| r[i] * r[j]).sum::<f64>() / denom;
            cov[i][j] = s;
            cov[j][i] = s;
        }
    }
    let (values, vectors) = symmetric_eigen(&cov);
    let top = values.first().copied().unwrap_or(0.0).max(0.0);
    let tol = top * 1e-12 * d.max(1) as f64;
    let rank = values.iter().filter(|&&l| top > 0.0 && l > tol).count();

    let mut variances = Vec::with_capacity(components);
    let mut axes = Vec::with_capacity(components);
    for k in 0..components {
        if k < rank {
            let mut axis = vectors[k].clone();
            let lead = axis
                .iter()
                .enumerate()
                .fold(0, |best, (i, x)| if x.abs() > axis[best].abs() { i } else { best });
            if axis[lead] < 0.0 {
                axis.iter_mut().for_each(|x| *x = -*x);
            }
            variances.push(values[k]);
            axes.push(axis);
        } else {
            variances.push(0.0);
            axes.push(vec![0.0; d]);
        }
    }
    if rank < components {
        log::warn!("pca: matrix rank {rank} is below the {components} requested components");
    }
    let coordinates = centered
        .iter()
        .map(|r| {
            axes.iter()
                .map(|axis| r.iter().zip(axis).map(|(x, a)| x * a).sum())
                .collect()
        })
        .collect();
    Ok(Projection {
        coordinates,
        variances,
        axes,
        rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix() {
        let (vals, vecs) = symmetric_eigen(&[vec![1.0, 0.0], vec![0.0, 3.0]]);
        assert_eq!(vals, vec![3.0, 1.0]);
        assert_eq!(vecs[0], vec![0.0, 1.0]);
    }

    #[test]
    fn two_by_two_known_eigenpairs() {
        let (vals, vecs) = symmetric_eigen(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        assert!((vals[0] - 3.0).abs() < 1e-14 && (vals[1] - 1.0).abs() < 1e-14);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((vecs[0][0].abs() - r).abs() < 1e-14 && (vecs[0][1].abs() - r).abs() < 1e-14);
    }

    #[test]
    fn collinear_rows_have_flat_second_component() {
        let rows = vec![vec![1.0, 2.0], vec![2.0, 4.0], vec![3.0, 6.0]];
        let p = pca_project(&rows, 2).unwrap();
        assert_eq!(p.rank, 1);
        assert!(p.is_degenerate());
        for r in &p.coordinates {
            assert!(r[1].abs() <= 1e-10);
        }
        // first axis is (1,2)/sqrt(5), positive
        let s5 = 5f64.sqrt();
        assert!((p.coordinates[0][0] + s5).abs() < 1e-12);
        assert!((p.coordinates[2][0] - s5).abs() < 1e-12);
    }

    #[test]
    fn row_permutation_permutes_output() {
        let rows = vec![
            vec![1.0, 0.2, 0.3],
            vec![0.2, 1.0, 0.5],
            vec![0.3, 0.5, 1.0],
            vec![0.9, 0.1, 0.4],
        ];
        let perm = [2, 0, 3, 1];
        let permuted: Vec<Vec<f64>> = perm.iter().map(|&i| rows[i].clone()).collect();
        let a = pca_project(&rows, 2).unwrap();
        let b = pca_project(&permuted, 2).unwrap();
        for (k, &i) in perm.iter().enumerate() {
            for c in 0..2 {
                assert!((b.coordinates[k][c] - a.coordinates[i][c]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn variances_are_sorted_and_match_projections() {
        let rows: Vec<Vec<f64>> = (0..6)
            .map(|i| (0..6).map(|j| ((i * 7 + j * 3) % 5) as f64 / 4.0).collect())
            .collect();
        let p = pca_project(&rows, 3).unwrap();
        assert!(p.variances.windows(2).all(|w| w[0] >= w[1]));
        for c in 0..3 {
            let var: f64 = p.coordinates.iter().map(|r| r[c] * r[c]).sum::<f64>() / 5.0;
            assert!((var - p.variances[c]).abs() < 1e-8);
        }
    }

    #[test]
    fn too_few_rows() {
        assert!(matches!(pca_project(&[vec![1.0, 2.0]], 2), Err(VocabError::TooFew { .. })));
    }
}
