//! The full pipeline: normalize, extend, run an engine, project.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extension::{build_general, build_simple, simple_applies, Construction, ExtendedInstance};
use crate::gs::{project, solve_gs};
use crate::kernel::solve_kernel;
use crate::model::{Instance, Matching};
use crate::verify::{Certificate, Oracle, DEFAULT_CAP};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Auto,
    Gs,
    Kernel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConstructionChoice {
    Auto,
    Simple,
    General,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Auto => "auto",
            Engine::Gs => "gs",
            Engine::Kernel => "kernel",
        })
    }
}

impl FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> Result<Engine, String> {
        match s {
            "auto" => Ok(Engine::Auto),
            "gs" => Ok(Engine::Gs),
            "kernel" => Ok(Engine::Kernel),
            other => Err(format!("unknown engine `{other}` (expected auto, gs or kernel)")),
        }
    }
}

impl fmt::Display for ConstructionChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConstructionChoice::Auto => "auto",
            ConstructionChoice::Simple => "simple",
            ConstructionChoice::General => "general",
        })
    }
}

impl FromStr for ConstructionChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<ConstructionChoice, String> {
        match s {
            "auto" => Ok(ConstructionChoice::Auto),
            "simple" => Ok(ConstructionChoice::Simple),
            "general" => Ok(ConstructionChoice::General),
            other => Err(format!("unknown construction `{other}` (expected auto, simple or general)")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub engine: Engine,
    pub construction: ConstructionChoice,
    pub certify: bool,
    /// Record wall time in the report. Off by default so reports are reproducible.
    pub timing: bool,
    pub cap: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            engine: Engine::Auto,
            construction: ConstructionChoice::Auto,
            certify: false,
            timing: false,
            cap: DEFAULT_CAP,
        }
    }
}

/// Result of one pipeline run, before reporting.
#[derive(Clone, Debug)]
pub struct Solved {
    pub matching: Matching,
    pub engine: Engine,
    pub construction: Construction,
    pub extended: ExtendedInstance,
}

/// Builds the extended instance for the resolved construction.
pub fn extend(instance: &Instance, choice: ConstructionChoice) -> Result<ExtendedInstance> {
    instance.validated()?;
    let normalized = instance.normalize();
    match choice {
        ConstructionChoice::Simple => build_simple(&normalized),
        ConstructionChoice::General => build_general(&normalized),
        ConstructionChoice::Auto if simple_applies(&normalized) => build_simple(&normalized),
        ConstructionChoice::Auto => build_general(&normalized),
    }
}

/// Runs the pipeline with the given engine and construction.
pub fn run(instance: &Instance, engine: Engine, construction: ConstructionChoice) -> Result<Solved> {
    let extended = extend(instance, construction)?;
    let engine = match engine {
        Engine::Auto if instance.is_one_to_one() => Engine::Gs,
        Engine::Auto => Engine::Kernel,
        chosen => chosen,
    };
    let copies = match engine {
        Engine::Gs => solve_gs(&extended)?,
        _ => solve_kernel(&extended)?,
    };
    let matching = project(&extended, &copies);
    Ok(Solved { matching, engine, construction: extended.construction, extended })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveReport {
    pub matching: Matching,
    pub size: usize,
    pub criticality_score: usize,
    pub extended_copy_count: usize,
    pub engine: Engine,
    pub construction: Construction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_nanos: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
}

pub fn solve(instance: &Instance, options: &SolveOptions) -> Result<SolveReport> {
    let start = Instant::now();
    let solved = run(instance, options.engine, options.construction)?;
    let elapsed = start.elapsed();
    let certificate = if options.certify {
        Some(Oracle::new(instance, options.cap)?.certify(&solved.matching))
    } else {
        None
    };
    if !instance.matroids()?.is_feasible(instance, solved.matching.edges()) {
        return Err(Error::Precondition("engine returned an infeasible set".into()));
    }
    Ok(SolveReport {
        size: solved.matching.len(),
        criticality_score: instance.criticality_count(solved.matching.edges()),
        extended_copy_count: solved.extended.copies.len(),
        engine: solved.engine,
        construction: solved.construction,
        elapsed_nanos: options.timing.then(|| u64::try_from(elapsed.as_nanos()).unwrap_or(u64::MAX)),
        certificate,
        matching: solved.matching,
    })
}
