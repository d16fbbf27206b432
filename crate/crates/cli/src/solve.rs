use std::time::Instant;

use serde_json::{json, Map, Value};

use twvrp_core::binpack::{solve_plain, BinPackingInstance};
use twvrp_core::compact::{decide_weight_bound, solve_by_clients, ClientOptions, CompactError, DecisionReason};
use twvrp_core::cvrp_dp::solve_cvrp_tw;
use twvrp_core::decomposition::{heuristic_decompose, parse_td, TreeDecomposition};
use twvrp_core::limits::ScaleLimits;
use twvrp_core::oracle::{oracle_cvrp, oracle_vrp, OracleError};
use twvrp_core::vrp_dp::{solve_vrp_tw, DpError};
use twvrp_core::{routing_to_value, Routing, Variant, VerifyOptions, VrpInstance};

use crate::{load_instance, read, write_or_print, Algorithm, Failure, InputKind, SolveArgs};

struct Outcome {
    algorithm: &'static str,
    best: Option<(u64, Routing)>,
}

struct Ctx<'a> {
    inst: &'a VrpInstance,
    td: Option<TreeDecomposition>,
    limits: ScaleLimits,
    threads: usize,
    verify: VerifyOptions,
}

impl Ctx<'_> {
    fn client_options(&self) -> ClientOptions {
        let cap = (self.limits.client_cap != usize::MAX).then_some(self.limits.client_cap);
        ClientOptions { client_cap: cap, threads: self.threads, verify: self.verify }
    }

    fn width(&mut self) -> usize {
        let inst = self.inst;
        self.td.get_or_insert_with(|| heuristic_decompose(&inst.graph)).width()
    }

    fn tw_dp(&mut self) -> Result<Outcome, Failure> {
        let capacitated = self.inst.variant.is_capacitated();
        let cap = if capacitated { self.limits.cvrp_width_cap } else { self.limits.vrp_width_cap };
        let width = self.width();
        if width > cap {
            return Err(Failure::guard(format!("decomposition width {width} exceeds the cap of {cap} (set TWVRP_SCALE_GUARD=off to lift)")));
        }
        if !self.verify.zero_length_walks_visit {
            return Err(Failure::input("the treewidth DPs do not support strict zero-length walk semantics"));
        }
        let td = self.td.as_ref();
        let (algorithm, sol) = if capacitated {
            ("cvrp-tw-dp", solve_cvrp_tw(self.inst, td))
        } else {
            ("tw-dp", solve_vrp_tw(self.inst, td))
        };
        let sol = sol.map_err(dp_failure)?;
        Ok(Outcome { algorithm, best: sol.map(|s| (s.weight, s.routing)) })
    }

    fn clients(&self) -> Result<Outcome, Failure> {
        let sol = solve_by_clients(self.inst, &self.client_options()).map_err(compact_failure)?;
        Ok(Outcome { algorithm: "clients", best: sol.map(|s| (s.weight, s.routing)) })
    }

    fn oracle(&self) -> Result<Outcome, Failure> {
        let limits = &self.limits.oracle;
        let out = if self.inst.variant.is_capacitated() {
            oracle_cvrp(self.inst, limits, &self.verify)
        } else {
            oracle_vrp(self.inst, limits, &self.verify)
        };
        let out = out.map_err(|e| match e {
            OracleError::TooLarge(_) => Failure::guard(e),
            OracleError::WrongVariant(_) => Failure::input(e),
        })?;
        Ok(Outcome { algorithm: "oracle", best: out.map(|o| (o.weight, o.routing)) })
    }

    fn auto(&mut self) -> Result<Outcome, Failure> {
        let cap = if self.inst.variant.is_capacitated() { self.limits.cvrp_width_cap } else { self.limits.vrp_width_cap };
        if self.verify.zero_length_walks_visit && self.width() <= cap {
            return self.tw_dp();
        }
        if self.inst.variant != Variant::Evrp && self.inst.clients.len() <= self.limits.client_cap {
            return self.clients();
        }
        match self.oracle() {
            Err(f) if f.code == 4 => Err(Failure::guard("no applicable exact algorithm at this scale")),
            other => other,
        }
    }

    fn run(&mut self, algorithm: Algorithm) -> Result<Outcome, Failure> {
        match algorithm {
            Algorithm::Auto => self.auto(),
            Algorithm::TwDp => self.tw_dp(),
            Algorithm::Clients => self.clients(),
            Algorithm::Oracle => self.oracle(),
        }
    }
}

fn dp_failure(e: DpError) -> Failure {
    Failure::input(e)
}

fn compact_failure(e: CompactError) -> Failure {
    match e {
        CompactError::TooManyClients { .. } => Failure::guard(format!("{e} (set TWVRP_SCALE_GUARD=off to lift)")),
        _ => Failure::input(e),
    }
}

fn elapsed_ms(start: Instant) -> Value {
    json!((start.elapsed().as_secs_f64() * 1e6).round() / 1e3)
}

pub fn run(args: &SolveArgs) -> Result<u8, Failure> {
    if args.variant == Some(InputKind::Binpacking) {
        return bin_packing(args);
    }
    let start = Instant::now();
    let inst = load_instance(&args.instance)?;
    let td = match &args.td {
        Some(p) => Some(parse_td(&read(p)?).map_err(|e| Failure::input(format!("{}: {e}", p.display())))?),
        None => None,
    };
    let mut ctx = Ctx {
        inst: &inst,
        td,
        limits: ScaleLimits::from_env(),
        threads: args.threads.max(1),
        verify: VerifyOptions { zero_length_walks_visit: !args.strict_zero_length },
    };

    let mut doc = Map::new();
    let mut human = Vec::new();
    let outcome = match args.decide {
        Some(r) => {
            let decided = if matches!(args.algorithm, Algorithm::Auto | Algorithm::Clients) {
                match decide_weight_bound(&inst, r, &ctx.client_options()) {
                    Ok(d) => Some(d),
                    Err(e) if args.algorithm == Algorithm::Clients => return Err(compact_failure(e)),
                    Err(_) => None,
                }
            } else {
                None
            };
            let (answer, reason, outcome) = match decided {
                Some(d) if d.reason == DecisionReason::VolumeBound => (false, "volume-bound", None),
                Some(d) => (d.feasible, "search", Some(Outcome { algorithm: "clients", best: d.solution.map(|s| (s.weight, s.routing)) })),
                None => {
                    let o = ctx.run(args.algorithm)?;
                    (o.best.as_ref().is_some_and(|b| b.0 <= r), "search", Some(o))
                }
            };
            doc.insert("decide".into(), json!(r));
            doc.insert("answer".into(), json!(if answer { "yes" } else { "no" }));
            doc.insert("reason".into(), json!(reason));
            human.push(if answer { "yes".to_string() } else { "no".to_string() });
            outcome
        }
        None => Some(ctx.run(args.algorithm)?),
    };
    if let Some(o) = outcome {
        doc.insert("algorithm".into(), json!(o.algorithm));
        match o.best {
            Some((w, routing)) => {
                doc.insert("result".into(), json!("optimal"));
                doc.insert("weight".into(), json!(w));
                if let Value::Object(r) = routing_to_value(&routing) {
                    doc.extend(r);
                }
                if args.decide.is_none() {
                    human.push(format!("algorithm: {}", o.algorithm));
                    human.push(format!("optimal weight {w}"));
                    for (i, walk) in routing.walks.iter().enumerate() {
                        let path: Vec<String> = walk.vertices.iter().map(|v| v.to_string()).collect();
                        human.push(format!("walk {i}: {}", path.join(" ")));
                    }
                }
            }
            None => {
                doc.insert("result".into(), json!("infeasible"));
                if args.decide.is_none() {
                    human.push(format!("algorithm: {}", o.algorithm));
                    human.push("infeasible".into());
                }
            }
        }
    } else {
        doc.insert("algorithm".into(), json!("volume-bound"));
    }
    doc.insert("wall_time_ms".into(), elapsed_ms(start));
    finish(args, doc, human)
}

fn finish(args: &SolveArgs, doc: Map<String, Value>, human: Vec<String>) -> Result<u8, Failure> {
    println!("{}", human.join("\n"));
    if let Some(out) = &args.out {
        let mut text = serde_json::to_string(&Value::Object(doc)).expect("document serializes");
        text.push('\n');
        write_or_print(Some(out), &text)?;
    }
    Ok(0)
}

fn bin_packing(args: &SolveArgs) -> Result<u8, Failure> {
    if args.decide.is_some() {
        return Err(Failure::input("--decide does not apply to bin packing"));
    }
    let start = Instant::now();
    let path = args.instance.display();
    let text = read(&args.instance)?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| Failure::input(format!("{path}: malformed document: {e}")))?;
    let bp = parse_bin_packing(&doc).map_err(|m| Failure::input(format!("{path}: {m}")))?;
    let packed = solve_plain(&bp).map_err(Failure::input)?;
    let mut out = Map::new();
    out.insert("algorithm".into(), json!("binpacking"));
    let mut human = Vec::new();
    match packed {
        Some(bins) => {
            human.push(format!("feasible with {} of {} bins", bins.len(), bp.bins));
            for (i, b) in bins.iter().enumerate() {
                let sizes: Vec<String> = b.iter().map(|&x| bp.sizes[x].to_string()).collect();
                human.push(format!("bin {i}: items {:?} sizes {}", b, sizes.join("+")));
            }
            out.insert("result".into(), json!("feasible"));
            out.insert("bins".into(), json!(bins));
        }
        None => {
            human.push("infeasible".into());
            out.insert("result".into(), json!("infeasible"));
        }
    }
    out.insert("wall_time_ms".into(), elapsed_ms(start));
    finish(args, out, human)
}

fn parse_bin_packing(doc: &Value) -> Result<BinPackingInstance, String> {
    let obj = doc.as_object().ok_or("expected an object")?;
    let num = |key: &str| obj.get(key).and_then(Value::as_u64).ok_or(format!("{key}: expected a nonnegative integer"));
    let items = obj.get("items").and_then(Value::as_array).ok_or("items: expected an array")?;
    let sizes = items
        .iter()
        .enumerate()
        .map(|(i, v)| match v.as_u64() {
            Some(0) => Err(format!("items.{i}: size must be positive")),
            Some(s) => Ok(s),
            None => Err(format!("items.{i}: expected a positive integer")),
        })
        .collect::<Result<Vec<u64>, String>>()?;
    Ok(BinPackingInstance { sizes, capacity: num("B")?, bins: num("k")? as usize })
}
