use std::fmt::Write;

use anyhow::{bail, Context, Result};
use cryptopath_core::channel::{
    bundled_scenario, bundled_scenarios, scenario_check, OpCall, OpId, Playground, ScenarioConfig,
    Submission, Verdict,
};
use serde_json::json;

use crate::args::{ScenarioCmd, ScenarioSource};
use crate::CommandResult;

fn load(source: &ScenarioSource) -> Result<ScenarioConfig> {
    match (&source.name, &source.file) {
        (Some(name), _) => bundled_scenario(name).with_context(|| {
            let names: Vec<_> = bundled_scenarios().into_iter().map(|s| s.name).collect();
            format!("no bundled scenario {name:?}; try one of {}", names.join(", "))
        }),
        (None, Some(path)) => Ok(ScenarioConfig::load(path)?),
        (None, None) => bail!("give a scenario with --name or --file"),
    }
}

fn op_name(op: OpId) -> String {
    serde_json::to_value(op)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_else(|| format!("{op:?}"))
}

fn verdict_line(v: &Verdict) -> String {
    match v {
        Verdict::Pass => "pass".to_string(),
        Verdict::Fail { reason } => format!("fail: {reason}"),
    }
}

fn judged(report: String, json: serde_json::Value, verdict: &Verdict) -> CommandResult {
    if verdict.passed() {
        CommandResult::ok(report, json)
    } else {
        CommandResult::negative(report, json)
    }
}

pub fn scenario(cmd: ScenarioCmd) -> Result<CommandResult> {
    match cmd {
        ScenarioCmd::Run { source, ops, answer } => {
            let config = load(&source)?;
            let ann = config.announcement();
            let mut report = format!("{}\n{}\n", ann.name, ann.narrative);
            let allowed: Vec<_> = ann.allowed_ops.iter().map(|o| op_name(*o)).collect();
            writeln!(report, "operations: {}", allowed.join(", ")).unwrap();
            writeln!(report, "challenge: {}", serde_json::to_string(&ann.challenge)?).unwrap();
            let mut playground = Playground::new(config);
            let mut results = Vec::new();
            for raw in &ops {
                let call: OpCall = serde_json::from_str(raw).with_context(|| format!("reading operation {raw}"))?;
                let out = playground.call(call)?;
                writeln!(report, "> {raw}\n{out}").unwrap();
                results.push(out);
            }
            let mut json = json!({ "announcement": ann, "results": results });
            let Some(answer) = answer else {
                return Ok(CommandResult::ok(report, json));
            };
            let verdict = playground.submit(answer);
            write!(report, "verdict: {}", verdict_line(&verdict)).unwrap();
            json["verdict"] = serde_json::to_value(&verdict)?;
            Ok(judged(report, json, &verdict))
        }
        ScenarioCmd::Check { source, answer, ops } => {
            let config = load(&source)?;
            let ops_used = ops
                .iter()
                .filter(|s| !s.trim().is_empty())
                .map(|s| serde_json::from_value::<OpId>(json!(s.trim())).with_context(|| format!("unknown operation {s:?}")))
                .collect::<Result<Vec<_>>>()?;
            let verdict = scenario_check(&config, &Submission { answer, ops_used });
            let report = verdict_line(&verdict);
            let json = serde_json::to_value(&verdict)?;
            Ok(judged(report, json, &verdict))
        }
    }
}
