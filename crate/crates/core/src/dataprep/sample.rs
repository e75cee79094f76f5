use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::DataTable;
use crate::error::{Error, Result};

fn class_indices(table: &DataTable) -> [Vec<usize>; 2] {
    let mut out: [Vec<usize>; 2] = Default::default();
    for (i, &l) in table.labels.iter().enumerate() {
        out[l as usize].push(i);
    }
    out
}

/// Keeps every minority row and an equal-sized random draw of the majority,
/// then shuffles.
pub fn undersample_balanced(table: &DataTable, seed: u64) -> Result<DataTable> {
    let [mut neg, mut pos] = class_indices(table);
    if neg.is_empty() || pos.is_empty() {
        return Err(Error::Data("undersampling needs both classes present".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = neg.len().min(pos.len());
    for class in [&mut neg, &mut pos] {
        if class.len() > k {
            class.shuffle(&mut rng);
            class.truncate(k);
        }
    }
    let mut keep: Vec<usize> = neg.into_iter().chain(pos).collect();
    keep.sort_unstable();
    keep.shuffle(&mut rng);
    Ok(table.select(&keep))
}

/// Stratified split; each class contributes `round(fraction · count)` test rows.
pub fn split_train_test(table: &DataTable, test_fraction: f64, seed: u64) -> Result<(DataTable, DataTable)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidSpec(format!(
            "test fraction must lie in (0,1), got {test_fraction}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (c, mut idx) in class_indices(table).into_iter().enumerate() {
        if idx.len() < 2 {
            return Err(Error::Data(format!("class {c} has {} rows, need at least 2", idx.len())));
        }
        let n_test = (test_fraction * idx.len() as f64).round() as usize;
        let n_test = n_test.clamp(1, idx.len() - 1);
        idx.shuffle(&mut rng);
        test.extend_from_slice(&idx[..n_test]);
        train.extend_from_slice(&idx[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((table.select(&train), table.select(&test)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn table(neg: usize, pos: usize) -> DataTable {
        let n = neg + pos;
        let rows = (0..n).map(|i| vec![i as f64]).collect();
        let labels = (0..n).map(|i| u8::from(i >= neg)).collect();
        DataTable::new(vec!["x".into()], rows, labels, "y").unwrap()
    }

    #[test]
    fn undersample_counts_and_determinism() {
        let t = table(500, 40);
        let a = undersample_balanced(&t, 1).unwrap();
        assert_eq!(a.class_counts(), [40, 40]);
        let ids: BTreeSet<u64> = a.row_ids.iter().copied().collect();
        assert!((500..540).all(|i| ids.contains(&i)));
        assert_eq!(a, undersample_balanced(&t, 1).unwrap());
        assert_ne!(a.row_ids, undersample_balanced(&t, 2).unwrap().row_ids);
    }

    #[test]
    fn undersample_balanced_input_keeps_all() {
        let t = table(5, 5);
        let a = undersample_balanced(&t, 3).unwrap();
        let ids: BTreeSet<u64> = a.row_ids.iter().copied().collect();
        assert_eq!(ids.len(), 10);
        assert!(undersample_balanced(&table(4, 0), 0).is_err());
    }

    #[test]
    fn split_984() {
        let t = table(492, 492);
        let (tr, te) = split_train_test(&t, 0.2, 5).unwrap();
        assert_eq!((tr.len(), te.len()), (788, 196));
        assert_eq!(te.class_counts(), [98, 98]);
        let a: BTreeSet<u64> = tr.row_ids.iter().copied().collect();
        let b: BTreeSet<u64> = te.row_ids.iter().copied().collect();
        assert!(a.is_disjoint(&b));
        assert_eq!(a.len() + b.len(), 984);
        let (tr2, te2) = split_train_test(&t, 0.2, 5).unwrap();
        assert_eq!((tr, te), (tr2, te2));
    }

    #[test]
    fn split_guards() {
        assert!(split_train_test(&table(10, 10), 0.0, 0).is_err());
        assert!(split_train_test(&table(10, 1), 0.2, 0).is_err());
    }
}
