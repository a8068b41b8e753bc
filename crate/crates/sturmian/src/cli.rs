//! Command-line front end: argument types, input grammars and the subcommand runners.
//!
//! Runners return a [`Report`] instead of printing, so the binary stays a thin shell and the
//! commands can be exercised directly.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::lattice::{self, Dir, Form, LatticeParams};
use crate::qfield::{cf_eval, quad_root_in_unit, ContinuedFraction, QuadReal, Rat};
use crate::render::{self, RenderSpec};
use crate::superlattice::{orbit, verify_psi};
use crate::tileset::{self, Dedup};
use crate::words::SkewVariant;
use crate::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "sturmian", version, about = "Exact Sturmian lattices and aperiodic patch-tile catalogs")]
pub struct Cli {
    /// Seed for every randomly sampled intercept.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output file; `.svg` writes a picture, anything else JSON.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Classify a lattice in the transition graph.
    Classify(LatticeArgs),
    /// Exact line coordinates of a lattice.
    Lattice {
        #[command(flatten)]
        lat: LatticeArgs,
        #[arg(long, default_value_t = 8)]
        window: i64,
        #[arg(long, value_enum, default_value_t = FormArg::Cabinet)]
        form: FormArg,
    },
    /// Orbit of the SL substitution and the super lattice overlay.
    Super {
        #[command(flatten)]
        lat: LatticeArgs,
        #[arg(long, default_value_t = 1)]
        level: usize,
        #[arg(long, default_value_t = 8)]
        window: i64,
        #[arg(long, value_enum, default_value_t = FormArg::Cabinet)]
        form: FormArg,
    },
    /// Build and validate the patch-tile catalog of a quadratic slope.
    Tileset {
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, value_enum, default_value_t = DedupArg::Isometry)]
        dedup: DedupArg,
        /// Side of the windows tiled for validation.
        #[arg(long, default_value_t = 40)]
        check_window: i64,
        /// Number of random intercepts used for validation.
        #[arg(long, default_value_t = 3)]
        samples: usize,
    },
    /// Rectangular patches of a slope.
    Patches {
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long)]
        r1: Option<i64>,
        #[arg(long)]
        r2: Option<i64>,
    },
    /// Tile a window of cabinet cells with catalog tiles.
    Tiling {
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        /// Intercepts `ρ₁,ρ₂`; sampled from the seed when omitted.
        #[arg(long, allow_hyphen_values = true)]
        rho: Option<String>,
        #[arg(long, default_value_t = 40)]
        window: i64,
        #[arg(long, value_enum, default_value_t = FormArg::Cabinet)]
        form: FormArg,
        #[arg(long)]
        basepoints: bool,
    },
    /// Run the exact checks for one slope.
    Verify {
        #[command(flatten)]
        lat: LatticeArgs,
        #[arg(long, default_value_t = 50)]
        window: i64,
        #[arg(long, default_value_t = 3)]
        samples: usize,
    },
}

#[derive(Args, Debug, Clone)]
pub struct LatticeArgs {
    /// Slope: `p/q`, `sqrt:D,a,b`, `cf:[d0;(p1,…)]`, `quad:u,v` or an expression like `-1+sqrt(2)`.
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    pub alpha: String,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub kappa: String,
    /// Intercepts `ρ₀,ρ₁,ρ₂` (zero sum).
    #[arg(long, default_value = "0,0,0", allow_hyphen_values = true)]
    pub rho: String,
    /// Family for rational slopes.
    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,
    /// Block choices for the periodic family, e.g. `10`.
    #[arg(long, default_value = "1")]
    pub choices: String,
    #[arg(long, value_enum)]
    pub preset: Option<PresetArg>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormArg {
    Cabinet,
    Isometric,
}

impl From<FormArg> for Form {
    fn from(f: FormArg) -> Form {
        match f {
            FormArg::Cabinet => Form::Cabinet,
            FormArg::Isometric => Form::Isometric,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum DedupArg {
    Translation,
    Isometry,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum VariantArg {
    Periodic,
    SkewA,
    SkewB,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum PresetArg {
    Kagome,
    Periodic,
}

/// What a command produced.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct Report {
    pub text: String,
    /// Document for `--out`, if the command has one.
    pub document: Option<String>,
    pub success: bool,
}

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse { pos: 0, msg: msg.into() }
}

fn parse_rat(s: &str) -> Result<Rat> {
    s.trim().parse::<Rat>().map_err(|_| perr(format!("not a rational: '{s}'")))
}

/// Parse a number in any of the accepted slope grammars.
pub fn parse_number(s: &str) -> Result<QuadReal> {
    let s = s.trim();
    if s.is_empty() {
        return Err(perr("empty number"));
    }
    if let Some(r) = s.strip_prefix("sqrt:") {
        let parts: Vec<&str> = r.split(',').collect();
        if parts.len() != 3 {
            return Err(perr("expected sqrt:D,a,b"));
        }
        let d: u64 = parts[0].trim().parse().map_err(|_| perr("bad radicand"))?;
        let a = parse_rat(parts[1])?;
        let b = parse_rat(parts[2])?;
        return Ok(QuadReal::new(a, b, d));
    }
    if let Some(r) = s.strip_prefix("cf:") {
        let cf: ContinuedFraction = r.parse()?;
        return Ok(cf_eval(&cf)?.value);
    }
    if let Some(r) = s.strip_prefix("quad:") {
        let parts: Vec<&str> = r.split(',').collect();
        if parts.len() != 2 {
            return Err(perr("expected quad:u,v"));
        }
        return quad_root_in_unit(&parse_rat(parts[0])?, &parse_rat(parts[1])?);
    }
    s.parse()
}

pub fn parse_list(s: &str, n: usize) -> Result<Vec<QuadReal>> {
    let v: Vec<QuadReal> = s.split(',').map(parse_number).collect::<Result<_>>()?;
    if v.len() != n {
        return Err(perr(format!("expected {n} comma-separated values, got {}", v.len())));
    }
    Ok(v)
}

fn rational_parts(x: &QuadReal) -> Option<(i64, i64)> {
    let r = x.as_rat()?;
    Some((r.numer().try_into().ok()?, r.denom().try_into().ok()?))
}

/// Build the lattice an argument set describes.
pub fn build_lattice(a: &LatticeArgs) -> Result<LatticeParams> {
    match a.preset {
        Some(PresetArg::Kagome) => return Ok(LatticeParams::kagome()),
        Some(PresetArg::Periodic) => return Ok(LatticeParams::periodic_example()),
        None => {}
    }
    let alpha = parse_number(&a.alpha)?;
    let kappa = parse_number(&a.kappa)?;
    if alpha.is_rational() {
        let (p, q) = rational_parts(&alpha).ok_or_else(|| perr("slope too large"))?;
        return match a.variant {
            None => Err(Error::RationalSlopeNeedsVariant),
            Some(VariantArg::Periodic) => {
                let choices: Vec<bool> = a
                    .choices
                    .chars()
                    .enumerate()
                    .map(|(i, c)| match c {
                        '1' => Ok(true),
                        '0' => Ok(false),
                        _ => Err(Error::Parse { pos: i, msg: "choices are 0/1".into() }),
                    })
                    .collect::<Result<_>>()?;
                LatticeParams::rational_periodic(p, q, kappa, &choices)
            }
            Some(VariantArg::SkewA) => LatticeParams::rational_skew(p, q, kappa, SkewVariant::A),
            Some(VariantArg::SkewB) => LatticeParams::rational_skew(p, q, kappa, SkewVariant::B),
        };
    }
    let rho = parse_list(&a.rho, 3)?;
    LatticeParams::irrational(kappa, alpha, [rho[0].clone(), rho[1].clone(), rho[2].clone()])
}

fn quadratic_slope(s: &str) -> Result<QuadReal> {
    let alpha = parse_number(s)?;
    if alpha.is_rational() {
        // a rational slope has periodic lattices; there is nothing to enforce
        return Err(Error::RationalSlope);
    }
    Ok(alpha)
}

/// Intercepts drawn from the seed, as exact rationals in `[0,1)`.
pub fn sample_rho(rng: &mut ChaCha8Rng) -> (QuadReal, QuadReal) {
    const DEN: i64 = 1_000_003;
    (QuadReal::frac(rng.gen_range(0..DEN), DEN), QuadReal::frac(rng.gen_range(0..DEN), DEN))
}

fn wants_svg(out: &Option<PathBuf>) -> bool {
    out.as_ref().and_then(|p| p.extension()).is_some_and(|e| e.eq_ignore_ascii_case("svg"))
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s
}

pub fn run(cli: &Cli) -> Result<Report> {
    let svg = wants_svg(&cli.out);
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    match &cli.command {
        Command::Classify(a) => classify(a),
        Command::Lattice { lat, window, form } => {
            let p = build_lattice(lat)?;
            let text = format!("{}\n", lattice::classify(&p));
            let document = if svg {
                let spec = RenderSpec { form: (*form).into(), window: *window, ..RenderSpec::default() };
                render::lattice_svg(&p, &spec)
            } else {
                let mut v = lattice::to_json(&p);
                v["window"] = json!(window);
                v["lines"] = json!({
                    "a": lattice::coords_json(&p, Dir::A, -window, window + 1),
                    "b": lattice::coords_json(&p, Dir::B, -window, window + 1),
                    "c": lattice::coords_json(&p, Dir::C, -window, window + 1),
                });
                pretty(&v)
            };
            Ok(Report { text, document: Some(document), success: true })
        }
        Command::Super { lat, level, window, form } => {
            let p = build_lattice(lat)?;
            let orb = orbit(&p, *level)?;
            let mut text = String::from("level\tkappa\talpha\tscale\n");
            for (i, (k, a, s)) in orb.iter().enumerate() {
                text.push_str(&format!("{i}\t{k}\t{a}\t{s}\n"));
            }
            let document = if svg {
                let spec = RenderSpec { form: (*form).into(), window: *window, ..RenderSpec::default() };
                render::super_svg(&p, *level, &spec)?
            } else {
                pretty(&json!({
                    "orbit": orb.iter().map(|(k, a, s)| json!({"kappa": k.to_string(), "alpha": a.to_string(), "scale": s.to_string()})).collect::<Vec<_>>(),
                }))
            };
            Ok(Report { text, document: Some(document), success: true })
        }
        Command::Tileset { alpha, dedup, check_window, samples } => {
            let alpha = quadratic_slope(alpha)?;
            let dedup = match dedup {
                DedupArg::Translation => Dedup::Translation,
                DedupArg::Isometry => Dedup::Isometry,
            };
            let cat = tileset::build_catalog(&alpha, dedup)?;
            let prop = tileset::verify_properness(&cat.classes, &cat.u, &cat.v);
            let mut text = String::new();
            let counts = cat.counts();
            text.push_str(&format!("slope {alpha}\nclasses {} | {}\nlayout {:?}\n", cat.classes[0], cat.classes[1], cat.layout));
            text.push_str(&format!("tiles {} (per class {:?}, supports {})\n", counts.tiles, counts.per_class, counts.supports));
            text.push_str(&format!("proper {}\n", prop.proper));
            let mut ok = prop.proper;
            let mut checks = Vec::new();
            for _ in 0..*samples {
                let rho = sample_rho(&mut rng);
                let r = tileset::tile_a_window(&cat, rho.clone(), *check_window);
                let line = match &r {
                    Ok(t) => format!("window {check_window} at rho ({}, {}): {} tiles", rho.0, rho.1, t.placed.len()),
                    Err(e) => format!("window {check_window} at rho ({}, {}): {e}", rho.0, rho.1),
                };
                ok &= r.is_ok();
                text.push_str(&line);
                text.push('\n');
                checks.push(json!({"rho": [rho.0.to_string(), rho.1.to_string()], "ok": r.is_ok()}));
            }
            let document = if svg {
                render::catalog_svg(&cat, &RenderSpec::default())
            } else {
                let mut v = cat.to_json();
                v["checks"] = json!({"proper": prop.proper, "windows": checks});
                pretty(&v)
            };
            Ok(Report { text, document: Some(document), success: ok })
        }
        Command::Patches { alpha, r1, r2 } => {
            let alpha = quadratic_slope(alpha)?;
            let (d1, d2) = match tileset::plan(&alpha) {
                Ok(p) => tileset::plan_patch_size(&p),
                Err(_) => (2, 2),
            };
            let (r1, r2) = (r1.unwrap_or(d1), r2.unwrap_or(d2));
            let reps = tileset::enumerate_rect_patches(&alpha, r1, r2)?;
            let expected = tileset::rect_patch_count(r1, r2);
            let ok = reps.len() as i64 == expected;
            let text = format!("{r1}x{r2} patches: {} (formula {expected})\n", reps.len());
            let word = |w: &[u8]| w.iter().map(|d| char::from(b'0' + d)).collect::<String>();
            let document = pretty(&json!({
                "alpha": alpha.to_string(),
                "r1": r1,
                "r2": r2,
                "patches": reps.iter().map(|r| json!({
                    "rho": [r.rho.0.to_string(), r.rho.1.to_string()],
                    "b": word(&r.patch.b),
                    "c": word(&r.patch.c),
                    "sab": r.patch.sab,
                })).collect::<Vec<_>>(),
            }));
            Ok(Report { text, document: Some(document), success: ok })
        }
        Command::Tiling { alpha, rho, window, form, basepoints } => {
            let alpha = quadratic_slope(alpha)?;
            let rho = match rho {
                Some(s) => {
                    let v = parse_list(s, 2)?;
                    (v[0].clone(), v[1].clone())
                }
                None => sample_rho(&mut rng),
            };
            let cat = tileset::build_catalog(&alpha, Dedup::Isometry)?;
            let tiling = tileset::tile_a_window(&cat, rho.clone(), *window)?;
            let text = format!("tiled {w}x{w} cells at rho ({}, {}) with {} tiles\n", rho.0, rho.1, tiling.placed.len(), w = tiling.window);
            let document = if svg {
                let mut spec = RenderSpec { form: (*form).into(), window: *window, ..RenderSpec::default() };
                spec.layers.basepoints = *basepoints;
                render::tiling_svg(&tiling, &alpha, &spec)?
            } else {
                pretty(&json!({
                    "alpha": alpha.to_string(),
                    "rho": [rho.0.to_string(), rho.1.to_string()],
                    "window": tiling.window,
                    "placed": tiling.placed.iter().map(|p| json!({"origin": [p.origin.0, p.origin.1], "tile": p.tile.to_json()})).collect::<Vec<_>>(),
                }))
            };
            Ok(Report { text, document: Some(document), success: true })
        }
        Command::Verify { lat, window, samples } => verify(lat, *window, *samples, &mut rng),
    }
}

fn classify(a: &LatticeArgs) -> Result<Report> {
    let p = build_lattice(a)?;
    let c = lattice::classify(&p);
    let (kappa, alpha, q) = lattice::invariants_of(&p);
    let mut text = format!("class {c}\npassage {kappa}\nslope {alpha}\nfrequency {q}\n");
    for d in Dir::ALL {
        text.push_str(&format!("{d:?}: {}\n", c.tags[d.index()]));
    }
    let mut v = lattice::to_json(&p);
    v["frequency"] = json!(q.to_string());
    v["tags"] = json!(c.tags.iter().map(|t| t.to_string()).collect::<Vec<_>>());
    Ok(Report { text, document: Some(pretty(&v)), success: true })
}

fn verify(a: &LatticeArgs, window: i64, samples: usize, rng: &mut ChaCha8Rng) -> Result<Report> {
    let base = build_lattice(a)?;
    let mut lines = Vec::new();
    let mut ok = true;
    let mut record = |name: String, pass: bool, lines: &mut Vec<(String, bool)>| {
        ok &= pass;
        lines.push((name, pass));
    };
    let irrational = !base.alpha.is_rational() && a.preset.is_none();
    for s in 0..samples.max(1) {
        // zero-sum intercepts (ρ₁, ρ₂, −ρ₁−ρ₂), or the lattice as given for rational slopes
        let p = if irrational && s > 0 {
            let (r1, r2) = sample_rho(rng);
            LatticeParams::irrational(base.kappa.clone(), base.alpha.clone(), [-(&r1 + &r2), r1, r2])?
        } else {
            base.clone()
        };
        let rho = p.rho.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(", ");
        record(format!("axiom |a+b+c| = 1/2 on window {window}, rho ({rho})"), lattice::verify_axiom(&p, window).is_ok(), &mut lines);
        if !p.alpha.is_zero() {
            let r = verify_psi(&p, window).map(|c| c.is_ok()).unwrap_or(false);
            record(format!("super lattice matches wider corridors, rho ({rho})"), r, &mut lines);
        }
        if !irrational {
            break;
        }
    }
    if irrational {
        if let Ok(cat) = tileset::build_catalog(&base.alpha, Dedup::Isometry) {
            let prop = tileset::verify_properness(&cat.classes, &cat.u, &cat.v);
            record(format!("tile classes {} | {} proper", cat.classes[0], cat.classes[1]), prop.proper, &mut lines);
            for _ in 0..samples {
                let rho = sample_rho(rng);
                let r = tileset::tile_a_window(&cat, rho.clone(), window).is_ok();
                record(format!("catalog covers window {window} at rho ({}, {})", rho.0, rho.1), r, &mut lines);
            }
        }
    }
    let mut text = String::new();
    for (name, pass) in &lines {
        text.push_str(&format!("{} {name}\n", if *pass { "PASS" } else { "FAIL" }));
    }
    let document = pretty(&json!({
        "alpha": base.alpha.to_string(),
        "kappa": base.kappa.to_string(),
        "checks": lines.iter().map(|(n, p)| json!({"name": n, "pass": p})).collect::<Vec<_>>(),
    }));
    Ok(Report { text, document: Some(document), success: ok })
}

/// Write via a temporary file in the same directory, then rename over the target.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })
}
