use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::path::Path;

use super::{csv_error, parse_label, DataTable};
use crate::error::{Error, Result};

/// Code assigned to the unknown age band `U`.
pub const AGE_UNKNOWN_CODE: u32 = 7;

const BANKSIM_COLUMNS: [&str; 10] = [
    "step",
    "customer",
    "age",
    "gender",
    "zipcodeOri",
    "merchant",
    "zipMerchant",
    "category",
    "amount",
    "fraud",
];
const BANKSIM_FEATURES: [&str; 7] = ["step", "customer", "age", "gender", "merchant", "category", "amount"];
const ENCODED: [&str; 4] = ["customer", "gender", "merchant", "category"];

/// Raw-value to code tables for every encoded column, `age` included.
pub type Vocabularies = BTreeMap<String, BTreeMap<String, u32>>;

fn strip_quotes(s: &str) -> &str {
    s.trim().trim_matches(|c| c == '\'' || c == '"')
}

fn age_code(raw: &str) -> Option<u32> {
    if raw == "U" {
        return Some(AGE_UNKNOWN_CODE);
    }
    let digits: String = raw.chars().filter(char::is_ascii_digit).collect();
    digits.parse().ok()
}

fn open(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file))
}

fn column_indices(path: &Path, header: &csv::StringRecord, names: &[&str]) -> Result<Vec<usize>> {
    let found: Vec<&str> = header.iter().map(strip_quotes).collect();
    names
        .iter()
        .map(|name| {
            found.iter().position(|h| h == name).ok_or_else(|| Error::MissingColumn {
                path: path.into(),
                column: name.to_string(),
            })
        })
        .collect()
}

fn parse_num(path: &Path, line: u64, col: &str, raw: &str) -> Result<f64> {
    let v: f64 = strip_quotes(raw).parse().map_err(|_| Error::Parse {
        path: path.into(),
        line,
        msg: format!("column {col}: cannot parse `{raw}` as a number"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse { path: path.into(), line, msg: format!("column {col}: non-finite value") });
    }
    Ok(v)
}

pub fn load_banksim(path: &Path) -> Result<DataTable> {
    load_banksim_encoded(path).map(|(t, _)| t)
}

/// Loads BankSim and returns the encoding tables alongside the data.
pub fn load_banksim_encoded(path: &Path) -> Result<(DataTable, Vocabularies)> {
    let mut rdr = open(path)?;
    let header = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    let idx = column_indices(path, &header, &BANKSIM_COLUMNS)?;
    let col = |name: &str| idx[BANKSIM_COLUMNS.iter().position(|c| *c == name).unwrap()];

    struct Raw {
        step: f64,
        age: u32,
        amount: f64,
        cats: [String; 4],
    }
    let mut raws = Vec::new();
    let mut labels = Vec::new();
    let mut ages: BTreeMap<String, u32> = BTreeMap::new();
    let mut vocab_sets: [BTreeSet<String>; 4] = Default::default();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let line = rec.position().map_or(0, |p| p.line());
        let age_raw = strip_quotes(&rec[col("age")]).to_string();
        let age = age_code(&age_raw).ok_or_else(|| Error::Parse {
            path: path.into(),
            line,
            msg: format!("column age: unrecognised band `{age_raw}`"),
        })?;
        ages.insert(age_raw, age);
        let cats: [String; 4] = std::array::from_fn(|k| strip_quotes(&rec[col(ENCODED[k])]).to_string());
        for (set, c) in vocab_sets.iter_mut().zip(&cats) {
            if !set.contains(c) {
                set.insert(c.clone());
            }
        }
        raws.push(Raw {
            step: parse_num(path, line, "step", &rec[col("step")])?,
            age,
            amount: parse_num(path, line, "amount", &rec[col("amount")])?,
            cats,
        });
        let label = parse_label(strip_quotes(&rec[col("fraud")]))
            .map_err(|msg| Error::Parse { path: path.into(), line, msg })?;
        labels.push(label);
    }

    let codes: Vec<BTreeMap<String, u32>> = vocab_sets
        .into_iter()
        .map(|set| set.into_iter().enumerate().map(|(i, v)| (v, i as u32)).collect())
        .collect();
    let rows = raws
        .iter()
        .map(|r| {
            let code = |k: usize| codes[k][&r.cats[k]] as f64;
            vec![r.step, code(0), r.age as f64, code(1), code(2), code(3), r.amount]
        })
        .collect();
    let mut vocab: Vocabularies = ENCODED.iter().map(|s| s.to_string()).zip(codes).collect();
    vocab.insert("age".into(), ages);
    let names = BANKSIM_FEATURES.iter().map(|s| s.to_string()).collect();
    Ok((DataTable::new(names, rows, labels, "fraud")?, vocab))
}

pub fn load_european(path: &Path) -> Result<DataTable> {
    let mut names: Vec<String> = vec!["Time".into()];
    names.extend((1..=28).map(|i| format!("V{i}")));
    names.push("Amount".into());
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    load_columns(path, &refs, "Class")
}

/// Loads a headed CSV whose last column is the binary label.
pub fn load_labeled_csv(path: &Path) -> Result<DataTable> {
    let mut rdr = open(path)?;
    let header = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    if header.len() < 2 {
        return Err(Error::Parse { path: path.into(), line: 1, msg: "need at least one feature and a label".into() });
    }
    let names: Vec<String> = header.iter().map(|h| strip_quotes(h).to_string()).collect();
    let refs: Vec<&str> = names[..names.len() - 1].iter().map(String::as_str).collect();
    load_columns(path, &refs, &names[names.len() - 1])
}

fn load_columns(path: &Path, features: &[&str], label: &str) -> Result<DataTable> {
    let mut rdr = open(path)?;
    let header = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    let idx = column_indices(path, &header, features)?;
    let label_idx = column_indices(path, &header, &[label])?[0];
    let (mut rows, mut labels) = (Vec::new(), Vec::new());
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let line = rec.position().map_or(0, |p| p.line());
        let row = idx
            .iter()
            .zip(features)
            .map(|(&i, name)| parse_num(path, line, name, &rec[i]))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
        let l = parse_label(strip_quotes(&rec[label_idx]))
            .map_err(|msg| Error::Parse { path: path.into(), line, msg })?;
        labels.push(l);
    }
    let names = features.iter().map(|s| s.to_string()).collect();
    DataTable::new(names, rows, labels, label)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
        let p = dir.join(name);
        std::fs::File::create(&p).unwrap().write_all(body.as_bytes()).unwrap();
        p
    }

    const BANKSIM: &str = "\"step\",\"customer\",\"age\",\"gender\",\"zipcodeOri\",\"merchant\",\"zipMerchant\",\"category\",\"amount\",\"fraud\"
0,'C2','3','M','28007','M348','28007','es_transportation',4.55,0
0,'C1','U','F','28007','M348','28007','es_health',39.68,1
1,'C2','5','E','28007','M1823','28007','es_transportation',26.89,0
";

    #[test]
    fn banksim_cleaning() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "bs.csv", BANKSIM);
        let (t, vocab) = load_banksim_encoded(&p).unwrap();
        assert_eq!(t.column_names, BANKSIM_FEATURES.map(String::from).to_vec());
        assert_eq!(t.label_column, "fraud");
        assert_eq!(t.labels, vec![0, 1, 0]);
        assert_eq!(t.rows[0], vec![0.0, 1.0, 3.0, 2.0, 1.0, 1.0, 4.55]);
        assert_eq!(t.rows[1], vec![0.0, 0.0, 7.0, 1.0, 1.0, 0.0, 39.68]);
        assert_eq!(t.rows[2], vec![1.0, 1.0, 5.0, 0.0, 0.0, 1.0, 26.89]);
        assert_eq!(vocab["age"]["U"], 7);
        assert_eq!(vocab["age"]["3"], 3);
        assert_eq!(vocab["merchant"]["M1823"], 0);
    }

    #[test]
    fn banksim_errors_carry_line() {
        let dir = tempfile::tempdir().unwrap();
        let body = BANKSIM.replace("26.89", "abc");
        let p = write(dir.path(), "bad.csv", &body);
        match load_banksim(&p) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
        let p = write(dir.path(), "nocol.csv", "step,customer\n1,2\n");
        assert!(matches!(load_banksim(&p), Err(Error::MissingColumn { .. })));
    }

    fn european_header() -> String {
        let mut h = vec!["\"Time\"".to_string()];
        h.extend((1..=28).map(|i| format!("\"V{i}\"")));
        h.push("\"Amount\"".into());
        h.push("\"Class\"".into());
        h.join(",")
    }

    #[test]
    fn european_parse_and_truncation() {
        let dir = tempfile::tempdir().unwrap();
        let vals: Vec<String> = (0..30).map(|i| format!("{}", i as f64 * 0.5)).collect();
        let row = format!("{},\"1\"", vals.join(","));
        let p = write(dir.path(), "eu.csv", &format!("{}\n{row}\n{row}\n", european_header()));
        let t = load_european(&p).unwrap();
        assert_eq!(t.n_features(), 30);
        assert_eq!(t.len(), 2);
        assert_eq!(t.rows[0][29], 14.5);
        assert_eq!(t.labels, vec![1, 1]);

        let short = vals[..20].join(",");
        let p = write(dir.path(), "eu_bad.csv", &format!("{}\n{row}\n{short}\n", european_header()));
        match load_european(&p) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }
}
