use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use csv::{QuoteStyle, ReaderBuilder, StringRecord, WriterBuilder};

use super::{CustomerRecord, Dataset, Gender, Label, Locality};
use crate::error::{Error, Result};

/// Column labels of the customer table, in order.
pub const CSV_HEADER: [&str; 10] = [
    "id",
    "Age",
    "Age_range_lower",
    "Age_range_upper",
    "Gender",
    "Income Category",
    "Locality",
    "Other Product purchased by this customer",
    "sentiment",
    "review",
];

pub fn load_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    read_csv(File::open(path)?)
}

/// Parses the customer table. Row numbers in errors count data rows from 1.
pub fn read_csv<R: Read>(reader: R) -> Result<Dataset> {
    let mut reader = ReaderBuilder::new().has_headers(true).from_reader(reader);
    check_header(reader.headers()?)?;

    let mut records = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row_no = i + 1;
        let row = row.map_err(|e| Error::Row {
            row: row_no,
            message: e.to_string(),
        })?;
        records.push(parse_row(&row, row_no)?);
    }
    Dataset::new(records)
}

fn check_header(header: &StringRecord) -> Result<()> {
    let got: Vec<&str> = header.iter().collect();
    if got.len() == 1 && got[0].is_empty() {
        return Err(Error::Schema {
            column: CSV_HEADER[0].into(),
            message: "missing header".into(),
        });
    }
    for expected in CSV_HEADER {
        if !got.contains(&expected) {
            return Err(Error::Schema {
                column: expected.into(),
                message: "missing column".into(),
            });
        }
    }
    for name in &got {
        if !CSV_HEADER.contains(name) {
            return Err(Error::Schema {
                column: name.to_string(),
                message: "unexpected column".into(),
            });
        }
    }
    if got.len() != CSV_HEADER.len() {
        return Err(Error::Schema {
            column: got[CSV_HEADER.len()].into(),
            message: "duplicated column".into(),
        });
    }
    for (pos, (g, e)) in got.iter().zip(CSV_HEADER).enumerate() {
        if *g != e {
            return Err(Error::Schema {
                column: e.into(),
                message: format!("expected at position {pos}, found `{g}`"),
            });
        }
    }
    Ok(())
}

fn parse_row(row: &StringRecord, row_no: usize) -> Result<CustomerRecord> {
    let cell = |i: usize| row.get(i).unwrap_or_default();
    let bad = |i: usize, what: &str| Error::Row {
        row: row_no,
        message: format!("column `{}`: {what}, got `{}`", CSV_HEADER[i], cell(i)),
    };
    let int = |i: usize| -> Result<u32> {
        cell(i)
            .trim()
            .parse::<u32>()
            .map_err(|_| bad(i, "expected a non-negative integer"))
    };

    let record = CustomerRecord {
        id: cell(0).to_string(),
        age: int(1)?,
        age_range_lower: int(2)?,
        age_range_upper: int(3)?,
        gender: cell(4)
            .parse::<Gender>()
            .map_err(|_| bad(4, "expected `M` or `F`"))?,
        income_category: int(5)?,
        locality: cell(6)
            .parse::<Locality>()
            .map_err(|_| bad(6, "expected `City` or `Outskirts`"))?,
        other_product_id: int(7)?,
        sentiment: match cell(8).trim() {
            "0" => Label::Negative,
            "1" => Label::Positive,
            _ => return Err(bad(8, "expected `0` or `1`")),
        },
        review: cell(9).to_string(),
    };
    if record.id.is_empty() {
        return Err(bad(0, "expected a non-empty id"));
    }
    record.validate().map_err(|e| Error::Row {
        row: row_no,
        message: e.to_string(),
    })?;
    Ok(record)
}

/// Writes the canonical header followed by one line per record.
pub fn write_csv<W: Write>(ds: &Dataset, writer: W) -> Result<()> {
    let mut writer = WriterBuilder::new()
        .quote_style(QuoteStyle::Necessary)
        .from_writer(writer);
    writer.write_record(CSV_HEADER)?;
    for r in ds.records() {
        writer.write_record([
            r.id.as_str(),
            &r.age.to_string(),
            &r.age_range_lower.to_string(),
            &r.age_range_upper.to_string(),
            &r.gender.to_string(),
            &r.income_category.to_string(),
            &r.locality.to_string(),
            &r.other_product_id.to_string(),
            &r.sentiment.to_string(),
            &r.review,
        ])?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_csv_file(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    write_csv(ds, File::create(path)?)
}
