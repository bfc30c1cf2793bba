use std::path::Path;

use anyhow::{Context, Result};
use info_core::{entropy, memorization_decomposition, mutual_information, JointDistribution};
use serde::Serialize;

use super::{parse_unit, pretty_json};
use crate::cli::InfoCmd;
use crate::manifest::RunRecorder;

#[derive(Serialize)]
struct MeasureOutput<'a> {
    measure: &'static str,
    variables: Vec<&'a [String]>,
    unit: &'a str,
    value: f64,
}

pub fn run(cmd: &InfoCmd, rec: &mut RunRecorder) -> Result<()> {
    match cmd {
        InfoCmd::Entropy { dist, vars, unit } => {
            let table = load_dist(rec, dist)?;
            let u = parse_unit(unit)?;
            rec.param("unit", unit.as_str());
            rec.param("vars", vars.join(","));
            let value = entropy(&table, &refs(vars), u)?;
            let out = MeasureOutput {
                measure: "entropy",
                variables: vec![vars.as_slice()],
                unit,
                value,
            };
            rec.write_output("info.json", &pretty_json(&out)?)?;
            println!("H({}) = {} {}", vars.join(","), value, unit);
        }
        InfoCmd::Mi {
            dist,
            a,
            b,
            given,
            unit,
        } => {
            let table = load_dist(rec, dist)?;
            let u = parse_unit(unit)?;
            rec.param("unit", unit.as_str());
            rec.param("a", a.join(","));
            rec.param("b", b.join(","));
            if let Some(g) = given {
                rec.param("given", g.join(","));
            }
            let given_refs = given.as_ref().map(|g| refs(g));
            let value = mutual_information(&table, &refs(a), &refs(b), given_refs.as_deref(), u)?;
            let mut variables = vec![a.as_slice(), b.as_slice()];
            if let Some(g) = given {
                variables.push(g.as_slice());
            }
            let out = MeasureOutput {
                measure: "mutual_information",
                variables,
                unit,
                value,
            };
            rec.write_output("info.json", &pretty_json(&out)?)?;
            match given {
                Some(g) => println!(
                    "I({}; {} | {}) = {} {}",
                    a.join(","),
                    b.join(","),
                    g.join(","),
                    value,
                    unit
                ),
                None => println!("I({}; {}) = {} {}", a.join(","), b.join(","), value, unit),
            }
        }
        InfoCmd::Decompose {
            dist,
            x,
            y,
            w,
            unit,
        } => {
            let table = load_dist(rec, dist)?;
            let u = parse_unit(unit)?;
            for (key, value) in [("x", x), ("y", y), ("w", w)] {
                rec.param(key, value.as_str());
            }
            rec.param("unit", unit.as_str());
            let d = memorization_decomposition(
                &table,
                &[x.as_str()],
                &[y.as_str()],
                &[w.as_str()],
                u,
            )?;
            rec.write_output("decompose.json", &pretty_json(&d)?)?;
            println!(
                "mem = {} {unit}  (marginal {} + relational {})",
                d.mem, d.mem_m, d.mem_r
            );
        }
    }
    Ok(())
}

fn refs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

fn load_dist(rec: &mut RunRecorder, path: &Path) -> Result<JointDistribution> {
    rec.input(path)?;
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading distribution {}", path.display()))?;
    JointDistribution::from_json(&text)
        .with_context(|| format!("parsing distribution {}", path.display()))
}
