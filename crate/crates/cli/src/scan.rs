//! Many files in parallel, one CSV row per (geometry, state).

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::input::Input;
use crate::pipeline::{run, Document, Settings};
use crate::Failure;

pub struct Outcome {
    pub input: Input,
    pub result: Result<Document, String>,
}

/// Solves every input independently; output is sorted by tag, then file name.
pub fn scan(inputs: Vec<Input>, settings: &Settings) -> Vec<Outcome> {
    let mut out: Vec<Outcome> = inputs
        .into_par_iter()
        .map(|input| {
            let result = run(&input, settings).map_err(|e| e.to_string());
            if let Err(e) = &result {
                log::warn!("{e}");
            }
            Outcome { input, result }
        })
        .collect();
    out.sort_by(|a, b| {
        let key = |o: &Outcome| o.input.tag.unwrap_or(f64::INFINITY);
        key(a).total_cmp(&key(b)).then_with(|| a.input.path.cmp(&b.input.path))
    });
    out
}

const MEASURE_COLUMNS: [&str; 20] = [
    "E_updown",
    "S_rho_up",
    "S_rho",
    "I_updown",
    "I2_updown",
    "N_updown",
    "N2_updown",
    "N2_upup",
    "N2_downdown",
    "E(1)",
    "E(2)",
    "lambda_max_r2ud",
    "S_p",
    "S_q",
    "beta",
    "n_members",
    "Snorm_rho_up",
    "Snorm_rho1_up",
    "Snorm_rho2_upup",
    "Snorm_rho2_updown",
];

/// `R, state, file, E0..E{n_roots-1}`, the measure columns, then `error`.
pub fn header(n_roots: usize) -> Vec<String> {
    let mut h: Vec<String> = ["R", "state", "file"].iter().map(|s| s.to_string()).collect();
    h.extend((0..n_roots).map(|k| format!("E{k}")));
    h.extend(MEASURE_COLUMNS.iter().map(|s| s.to_string()));
    h.push("error".into());
    h
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.12e}")).unwrap_or_default()
}

pub fn write_csv<W: Write>(outcomes: &[Outcome], n_roots: usize, out: W) -> Result<(), Failure> {
    let mut w = csv::Writer::from_writer(out);
    let width = header(n_roots).len();
    w.write_record(header(n_roots)).map_err(Failure::output)?;
    for o in outcomes {
        let tag = o.input.tag.map(|r| r.to_string()).unwrap_or_default();
        let file = o.input.path.display().to_string();
        match &o.result {
            Err(e) => {
                let mut row = vec![tag, String::new(), file];
                row.resize(width - 1, String::new());
                row.push(e.clone());
                w.write_record(&row).map_err(Failure::output)?;
            }
            Ok(doc) => {
                for l in &doc.reports {
                    let r = &l.report;
                    let mut row = vec![tag.clone(), l.state.clone(), file.clone()];
                    row.extend((0..n_roots).map(|k| cell(doc.energies.get(k).copied())));
                    let norm = r.normalized.unwrap_or(fermicorr::measures::NormalizedEntropies {
                        rho_up: None,
                        rho1_up: None,
                        rho2_upup: None,
                        rho2_updown: None,
                    });
                    let values = [
                        r.e_updown,
                        Some(r.s_rho_up),
                        Some(r.s_rho),
                        Some(r.i_updown),
                        Some(r.i2_updown),
                        Some(r.n_updown),
                        Some(r.n2_updown),
                        Some(r.n2_upup),
                        Some(r.n2_downdown),
                        Some(r.e1),
                        Some(r.e2),
                        Some(r.lambda_max_r2ud),
                        r.s_p,
                        r.s_q,
                        r.beta,
                        Some(r.n_members as f64),
                        norm.rho_up,
                        norm.rho1_up,
                        norm.rho2_upup,
                        norm.rho2_updown,
                    ];
                    row.extend(values.iter().map(|v| cell(*v)));
                    row.push(String::new());
                    w.write_record(&row).map_err(Failure::output)?;
                }
            }
        }
    }
    w.flush().map_err(Failure::output)?;
    Ok(())
}

#[derive(Serialize)]
#[serde(untagged)]
enum JsonRow<'a> {
    Ok(&'a Document),
    Err {
        file: String,
        tag: Option<f64>,
        error: &'a str,
    },
}

pub fn write_json<W: Write>(outcomes: &[Outcome], out: W) -> Result<(), Failure> {
    let rows: Vec<JsonRow> = outcomes
        .iter()
        .map(|o| match &o.result {
            Ok(doc) => JsonRow::Ok(doc),
            Err(e) => JsonRow::Err {
                file: o.input.path.display().to_string(),
                tag: o.input.tag,
                error: e,
            },
        })
        .collect();
    serde_json::to_writer_pretty(out, &rows).map_err(Failure::output)
}
