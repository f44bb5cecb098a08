//! The command-line driver.
//!
//! Exit codes: 0 on success, 1 on a mathematical negative (for instance a
//! level-strip search that exhausted its budget), 2 on input errors.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::character::DirichletCharacter;
use crate::classify::{enumerate_weak_eigenforms, half_sum_construct, strong_match, Provenance};
use crate::divided::{divide_congruence_int, equalize_weights, strip_level_search, BasisResolver};
use crate::hecke::{ReducedSpace, SpaceBasis};
use crate::nebentypus::{decompose_character, obstruction_check};
use crate::qexp::{sturm_bound, Group, QExpansion};
use crate::report::Report;
use crate::ring::{ModRing, RingElement};
use crate::spacefile::{
    digest_file, parse_catalog_file, parse_form_file, parse_matrix_str, parse_space_file,
    write_matrix_str,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Parser)]
#[command(
    name = "modpm",
    version,
    about = "Exact computation with modular forms and Hecke algebras modulo prime powers",
    disable_help_subcommand = true
)]
struct Cli {
    /// Seed echoed into reports (reproducibility of randomized harnesses).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sturm bound floor(k [SL2(Z):Gamma] / 12).
    Sturm {
        level: u64,
        weight: u32,
        /// Gamma_0 index formula.
        #[arg(long)]
        g0: bool,
        /// Gamma_1 index formula.
        #[arg(long)]
        g1: bool,
    },
    /// Integer matrix of T_n in a basis file (cached on disk by digest).
    HeckeMatrix {
        spacefile: PathBuf,
        n: u64,
        /// Cache directory (default: <spacefile>.tcache).
        #[arg(long)]
        cache_dir: Option<PathBuf>,
    },
    /// Enumerate and classify eigenforms mod p^m in a space.
    Classify {
        spacefile: PathBuf,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        m: u32,
        /// Eigenform conditions are imposed away from D (default level*p).
        #[arg(long = "D")]
        d: Option<u64>,
        /// Truncation bound for the eigen conditions (default: injectivity bound).
        #[arg(long)]
        bound: Option<usize>,
        /// Catalog of characteristic-zero eigenforms for strong matching.
        #[arg(long)]
        catalog: Option<PathBuf>,
    },
    /// Search for a level-N representative of a mod-p^m form at level Np^r.
    StripLevel {
        spacefile: PathBuf,
        /// 1-based row index of the form in the space file.
        #[arg(long, default_value_t = 1)]
        form: usize,
        #[arg(long)]
        target_level: u64,
        #[arg(long)]
        cmax: u32,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        m: u32,
        /// Directory with S_<k>_G1_<N>.basis / S_<k>_G0_<N>.basis files
        /// (default: the space file's directory).
        #[arg(long)]
        basis_dir: Option<PathBuf>,
        #[arg(long)]
        bound: Option<usize>,
    },
    /// Divide a coefficientwise congruence sum(g_k) = 0 mod pi^m by pi^m.
    Divide {
        /// One-row space files with the summands.
        forms: Vec<PathBuf>,
        #[arg(long)]
        pi: i64,
        #[arg(long)]
        m: u32,
    },
    /// Raise forms to a common weight with Eisenstein equalizers.
    Equalize {
        forms: Vec<PathBuf>,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        m: u32,
    },
    /// Decompose a nebentypus and decide the determinant obstruction.
    Obstruct {
        #[arg(long)]
        level: u64,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        m: u32,
        #[arg(long = "char")]
        character: String,
    },
    /// The half-sum construction h = (f + g) 2^{-1} mod p^2.
    Halfsum {
        spacefile: PathBuf,
        /// Row index (1-based) in the space file, or a one-row qexp file.
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        #[arg(long)]
        p: u64,
        #[arg(long = "D")]
        d: Option<u64>,
        #[arg(long)]
        bound: Option<usize>,
    },
}

/// Run the driver on argv (`argv[0]` is the program name). Returns the exit
/// code and the rendered report.
pub fn run(argv: &[String]) -> (i32, String) {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let msg = e.to_string();
            // help/version requests are successes
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INPUT,
            };
            return (code, msg);
        }
    };
    match dispatch(cli) {
        Ok((code, out)) => (code, out),
        Err(e) => (EXIT_INPUT, format!("error: {e}\n")),
    }
}

fn dispatch(cli: Cli) -> Result<(i32, String), Box<dyn std::error::Error>> {
    match cli.cmd {
        Cmd::Sturm {
            level,
            weight,
            g0,
            g1,
        } => {
            if g0 == g1 {
                return Err("pass exactly one of --g0 / --g1".into());
            }
            if level < 1 || weight < 1 {
                return Err("level and weight must be positive".into());
            }
            let group = if g0 { Group::Gamma0 } else { Group::Gamma1 };
            Ok((EXIT_OK, format!("{}\n", sturm_bound(level, weight, group))))
        }
        Cmd::HeckeMatrix {
            spacefile,
            n,
            cache_dir,
        } => hecke_matrix_cmd(&spacefile, n, cache_dir),
        Cmd::Classify {
            spacefile,
            p,
            m,
            d,
            bound,
            catalog,
        } => classify_cmd(&spacefile, p, m, d, bound, catalog, cli.seed),
        Cmd::StripLevel {
            spacefile,
            form,
            target_level,
            cmax,
            p,
            m,
            basis_dir,
            bound,
        } => strip_cmd(&spacefile, form, target_level, cmax, p, m, basis_dir, bound),
        Cmd::Divide { forms, pi, m } => divide_cmd(&forms, pi, m),
        Cmd::Equalize { forms, p, m } => equalize_cmd(&forms, p, m),
        Cmd::Obstruct {
            level,
            p,
            m,
            character,
        } => obstruct_cmd(level, p, m, &character),
        Cmd::Halfsum {
            spacefile,
            f,
            g,
            p,
            d,
            bound,
        } => halfsum_cmd(&spacefile, &f, &g, p, d, bound),
    }
}

fn ring_desc(ring: &ModRing) -> String {
    ring.to_string()
}

fn values_line(values: &std::collections::BTreeMap<u64, RingElement>) -> String {
    values
        .iter()
        .map(|(n, v)| format!("{n}={v}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn hecke_matrix_cmd(
    spacefile: &Path,
    n: u64,
    cache_dir: Option<PathBuf>,
) -> Result<(i32, String), Box<dyn std::error::Error>> {
    let space = parse_space_file(spacefile)?;
    let cache_dir = cache_dir.unwrap_or_else(|| {
        let mut d = spacefile.as_os_str().to_owned();
        d.push(".tcache");
        PathBuf::from(d)
    });
    let key = format!("T{n}.{}.mat", &space.digest()[..16]);
    let cache_path = cache_dir.join(&key);
    let mut cached = false;
    let matrix = if cache_path.exists() {
        let text = std::fs::read_to_string(&cache_path)?;
        cached = true;
        parse_matrix_str(&cache_path.display().to_string(), &text)?
    } else {
        let m = space.hecke_matrix(n)?;
        std::fs::create_dir_all(&cache_dir)?;
        // write via a temp file so concurrent readers never see partial data
        let tmp = cache_dir.join(format!(".{key}.tmp"));
        std::fs::write(&tmp, write_matrix_str(&m))?;
        std::fs::rename(&tmp, &cache_path)?;
        (*m).clone()
    };
    let mut report = Report::new("hecke-matrix");
    report.push("input", spacefile.display());
    report.push(
        "input-digest",
        format!("sha256:{}", digest_file(spacefile)?),
    );
    report.push("operator", format!("T{n}"));
    report.push("cache", if cached { "hit" } else { "miss" });
    report.push("cache-file", cache_path.display());
    for w in &space.warnings {
        report.push_warning(w);
    }
    let mut out = report.render();
    out.push('\n');
    out.push_str(&write_matrix_str(&matrix));
    Ok((EXIT_OK, out))
}

fn classify_cmd(
    spacefile: &Path,
    p: u64,
    m: u32,
    d: Option<u64>,
    bound: Option<usize>,
    catalog: Option<PathBuf>,
    seed: Option<u64>,
) -> Result<(i32, String), Box<dyn std::error::Error>> {
    let space = Arc::new(parse_space_file(spacefile)?);
    let d = d.unwrap_or(space.level * p);
    let bound = bound.unwrap_or(space.injectivity_bound()?);
    let ring = ModRing::zp(p, m)?;
    let rs = Arc::new(ReducedSpace::new(space.clone(), ring.clone()));
    let cat = match &catalog {
        Some(path) => Some(parse_catalog_file(path)?),
        None => None,
    };
    let found = enumerate_weak_eigenforms(&rs, d, bound)?;

    let mut report = Report::new("classify");
    report.push("input", spacefile.display());
    report.push(
        "input-digest",
        format!("sha256:{}", digest_file(spacefile)?),
    );
    if let Some(path) = &catalog {
        report.push("catalog", path.display());
        report.push("catalog-digest", format!("sha256:{}", digest_file(path)?));
    }
    report.push("ring", ring_desc(&ring));
    report.push("away-from", d);
    report.push("bound", bound);
    report.push("level", space.level);
    report.push("dim", space.dim());
    report.push("systems", found.len());
    report.push(
        "residual-irreducibility",
        "unknown (not decided by this tool)",
    );
    if let Some(s) = seed {
        report.push("seed", s);
    }
    for w in &space.warnings {
        report.push_warning(w);
    }
    for (i, (form, sys)) in found.iter().enumerate() {
        report.begin_block();
        report.push("system", i + 1);
        report.push("provenance", &sys.provenance);
        report.push("values", values_line(&sys.values));
        report.push(
            "coordinates",
            form.coords
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(","),
        );
        report.push("normalized", "a_1 = 1");
        report.push("multiplicative", sys.is_multiplicative());
        match &cat {
            None => report.push("strong-match", "no catalog supplied"),
            Some(c) => {
                let ms = strong_match(sys, c, &ring)?;
                if ms.is_empty() {
                    report.push(
                        "strong-match",
                        "none (catalog may be incomplete; weak-only relative to it)",
                    );
                } else {
                    for mt in ms {
                        report.push(
                            "strong-match",
                            format!("{} (prime-choice {})", mt.label, mt.prime_choice),
                        );
                        report.push("classification", Provenance::StrongLift(mt.label.clone()));
                    }
                }
            }
        }
    }
    Ok((EXIT_OK, report.render()))
}

struct DirResolver {
    dir: PathBuf,
    cache: std::collections::HashMap<(u32, u64), Option<Arc<SpaceBasis>>>,
}

impl BasisResolver for DirResolver {
    fn resolve(&mut self, weight: u32, level: u64) -> Option<Arc<SpaceBasis>> {
        if let Some(hit) = self.cache.get(&(weight, level)) {
            return hit.clone();
        }
        let mut found = None;
        for name in [
            format!("S_{weight}_G1_{level}.basis"),
            format!("S_{weight}_G0_{level}.basis"),
        ] {
            let path = self.dir.join(&name);
            if path.exists() {
                if let Ok(b) = parse_space_file(&path) {
                    found = Some(Arc::new(b));
                    break;
                }
            }
        }
        self.cache.insert((weight, level), found.clone());
        found
    }
}

#[allow(clippy::too_many_arguments)]
fn strip_cmd(
    spacefile: &Path,
    form: usize,
    target_level: u64,
    cmax: u32,
    p: u64,
    m: u32,
    basis_dir: Option<PathBuf>,
    bound: Option<usize>,
) -> Result<(i32, String), Box<dyn std::error::Error>> {
    let space = parse_space_file(spacefile)?;
    if form == 0 || form > space.dim() {
        return Err(format!("--form must be in 1..={}", space.dim()).into());
    }
    if target_level % p == 0 {
        return Err("the target level must be prime to p".into());
    }
    let ring = ModRing::zp(p, m)?;
    let row = &space.rows[form - 1];
    let reduced = row.reduce_mod(&ring);
    let dir = basis_dir
        .or_else(|| spacefile.parent().map(|d| d.to_path_buf()))
        .unwrap_or_else(|| PathBuf::from("."));
    let mut resolver = DirResolver {
        dir,
        cache: Default::default(),
    };
    let bound = bound.unwrap_or_else(|| reduced.coeffs.len().min(40));

    let mut report = Report::new("strip-level");
    report.push("input", spacefile.display());
    report.push(
        "input-digest",
        format!("sha256:{}", digest_file(spacefile)?),
    );
    report.push("form-row", form);
    report.push("source-level", space.level);
    report.push("target-level", target_level);
    report.push("ring", ring_desc(&ring));
    report.push("bound", bound);
    report.push("cmax", cmax);
    for w in &space.warnings {
        report.push_warning(w);
    }
    match strip_level_search(
        &reduced.coeffs,
        &ring,
        target_level,
        cmax,
        bound,
        &mut resolver,
    )? {
        Some(witness) => {
            report.begin_block();
            report.push("result", "found");
            report.push("weight-cap", witness.weight_cap);
            report.push(
                "coordinates",
                witness
                    .coords
                    .iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            );
            report.push(
                "expansion",
                witness
                    .values
                    .iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            );
            if !witness.missing_weights.is_empty() {
                report.push_warning(format!(
                    "no basis data for weights {:?}; treated as empty",
                    witness.missing_weights
                ));
            }
            Ok((EXIT_OK, report.render()))
        }
        None => {
            report.begin_block();
            report.push("result", "not found");
            report.push(
                "note",
                format!("search exhausted up to (cmax={cmax}, bound={bound}); this does not prove nonexistence"),
            );
            Ok((EXIT_NEGATIVE, report.render()))
        }
    }
}

fn load_one_row(path: &Path) -> Result<QExpansion<BigInt>, Box<dyn std::error::Error>> {
    Ok(parse_form_file(path)?)
}

fn divide_cmd(
    forms: &[PathBuf],
    pi: i64,
    m: u32,
) -> Result<(i32, String), Box<dyn std::error::Error>> {
    if forms.is_empty() {
        return Err("divide needs at least one form file".into());
    }
    let mut parsed = Vec::new();
    let mut report = Report::new("divide");
    for path in forms {
        report.push("input", path.display());
        report.push("input-digest", format!("sha256:{}", digest_file(path)?));
        parsed.push(load_one_row(path)?);
    }
    report.push("pi", pi);
    report.push("exponent", m);
    match divide_congruence_int(&parsed, &BigInt::from(pi), m) {
        Ok(witness) => {
            report.begin_block();
            report.push("result", "divided");
            report.push("checked-to", witness.checked_to);
            report.push(
                "expansion",
                witness
                    .output
                    .coeffs
                    .iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            );
            Ok((EXIT_OK, report.render()))
        }
        Err(e) => {
            report.begin_block();
            report.push("result", "congruence fails");
            report.push("detail", e);
            Ok((EXIT_NEGATIVE, report.render()))
        }
    }
}

fn equalize_cmd(
    forms: &[PathBuf],
    p: u64,
    m: u32,
) -> Result<(i32, String), Box<dyn std::error::Error>> {
    if forms.is_empty() {
        return Err("equalize needs at least one form file".into());
    }
    let mut parsed = Vec::new();
    let mut report = Report::new("equalize");
    for path in forms {
        report.push("input", path.display());
        report.push("input-digest", format!("sha256:{}", digest_file(path)?));
        parsed.push(load_one_row(path)?);
    }
    report.push("p", p);
    report.push("m", m);
    let equalized = equalize_weights(&parsed, p, m)?;
    for (i, e) in equalized.iter().enumerate() {
        report.begin_block();
        report.push("form", i + 1);
        report.push("original-weight", e.original_weight);
        report.push("equalizer-power", e.power_used);
        report.push("audited-trunc", e.audited_trunc);
        report.push(
            "weight",
            match &e.expansion.weight {
                crate::qexp::WeightTag::Single(k) => k.to_string(),
                crate::qexp::WeightTag::Multi(ks) => format!("{ks:?}"),
            },
        );
        report.push(
            "congruence",
            format!("unchanged mod {p}^{m} to the audited truncation"),
        );
    }
    Ok((EXIT_OK, report.render()))
}

fn obstruct_cmd(
    level: u64,
    p: u64,
    m: u32,
    character: &str,
) -> Result<(i32, String), Box<dyn std::error::Error>> {
    let chi = DirichletCharacter::parse(character, Some(level))?
        .unwrap_or_else(|| DirichletCharacter::trivial(level));
    if chi.modulus() != level {
        return Err(format!(
            "character modulus {} does not match the level {}",
            chi.modulus(),
            level
        )
        .into());
    }
    let decomp = decompose_character(&chi, p)?;
    let rep = obstruction_check(&decomp, m)?;
    let mut report = Report::new("obstruct");
    report.push("level", level);
    report.push("p", p);
    report.push("m", m);
    report.push("chi", chi.spec_string());
    report.begin_block();
    report.push("psi", decomp.psi.spec_string());
    report.push("teichmuller-exponent", decomp.teichmuller_exponent);
    report.push("eta", decomp.eta.spec_string());
    report.push("eta-order", format!("{}^{}", p, decomp.s));
    report.push("eta-conductor", decomp.eta.conductor());
    report.begin_block();
    report.push("ring", rep.ring_description);
    for (g, inside) in &rep.generator_tests {
        report.push(
            "subring-test",
            format!(
                "eta({g}) {}",
                if *inside {
                    "inside Z/p^m"
                } else {
                    "outside Z/p^m"
                }
            ),
        );
    }
    report.push("verdict", rep.verdict);
    report.push("shortcut-agrees", rep.shortcut_agrees);
    Ok((EXIT_OK, report.render()))
}

fn resolve_form_coords(
    space: &Arc<SpaceBasis>,
    spec: &str,
) -> Result<Vec<BigInt>, Box<dyn std::error::Error>> {
    if let Ok(idx) = spec.parse::<usize>() {
        if idx == 0 || idx > space.dim() {
            return Err(format!("row index must be in 1..={}", space.dim()).into());
        }
        let mut coords = vec![BigInt::from(0); space.dim()];
        coords[idx - 1] = BigInt::from(1);
        return Ok(coords);
    }
    let row = load_one_row(Path::new(spec))?;
    space
        .coordinates_of(&row.coeffs)
        .ok_or_else(|| format!("{spec} does not lie in the basis lattice").into())
}

fn halfsum_cmd(
    spacefile: &Path,
    f_spec: &str,
    g_spec: &str,
    p: u64,
    d: Option<u64>,
    bound: Option<usize>,
) -> Result<(i32, String), Box<dyn std::error::Error>> {
    let space = Arc::new(parse_space_file(spacefile)?);
    let d = d.unwrap_or(space.level * p);
    let bound = bound.unwrap_or(space.injectivity_bound()?);
    let f_coords = resolve_form_coords(&space, f_spec)?;
    let g_coords = resolve_form_coords(&space, g_spec)?;
    let hs = half_sum_construct(&space, &f_coords, &g_coords, p, d, bound)?;
    let mut report = Report::new("halfsum");
    report.push("input", spacefile.display());
    report.push(
        "input-digest",
        format!("sha256:{}", digest_file(spacefile)?),
    );
    report.push("p", p);
    report.push("away-from", d);
    report.push("bound", bound);
    report.push("ring", ring_desc(&hs.form.space.ring));
    for w in &space.warnings {
        report.push_warning(w);
    }
    report.begin_block();
    report.push(
        "lambda",
        hs.lambda
            .iter()
            .map(|(n, v)| format!("{n}={v}"))
            .collect::<Vec<_>>()
            .join(" "),
    );
    report.push(
        "mu",
        hs.mu
            .iter()
            .map(|(n, v)| format!("{n}={v}"))
            .collect::<Vec<_>>()
            .join(" "),
    );
    report.begin_block();
    report.push("h-coordinates", {
        hs.form
            .coords
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(",")
    });
    let values = hs.form.values();
    report.push(
        "h-expansion",
        values[..bound.min(values.len())]
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    for (n, nu) in &hs.certificate.entries {
        report.push(
            "eigenvalue",
            format!("T{n} -> {nu} (identity T{n} h = value * h verified mod p^2)"),
        );
    }
    report.push("possibly-liftable", hs.certificate.possibly_liftable);
    Ok((EXIT_OK, report.render()))
}

// the BigInt helpers are used by resolve_form_coords through coordinates_of
#[allow(unused)]
fn residue(c: &BigInt, q: u64) -> u64 {
    c.mod_floor(&BigInt::from(q)).to_u64().unwrap()
}
