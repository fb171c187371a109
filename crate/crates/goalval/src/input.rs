//! Turning command-line descriptions into functions, tables and instances.

use std::fs;
use std::path::Path;

use goalval_core::boolfn::{Family, TruthTable};
use goalval_core::constructions::GoalRecipe;
use goalval_core::evalsim::SbfeInstance;
use goalval_core::rational;
use goalval_core::readonce::{random_formula, ReadOnceFormula};
use goalval_core::utility::UtilityTable;
use num_rational::BigRational;
use num_traits::One;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::error::{CliError, Result};

/// A function given by family, hex table, formula, or random formula.
#[derive(Clone, Debug, Default)]
pub struct FunctionSpec {
    pub family: Option<String>,
    pub n: Option<usize>,
    pub k: Option<usize>,
    /// Bit string for the `unique` and `agree` families, `x_1` first.
    pub b: Option<String>,
    pub hex: Option<String>,
    pub readonce: Option<String>,
    /// Arity of a random read-once formula drawn with `seed`.
    pub random_readonce: Option<usize>,
    pub seed: u64,
}

/// The resolved function; formulas keep their tree for closed forms.
#[derive(Clone, Debug)]
pub struct Function {
    pub table: TruthTable,
    pub formula: Option<ReadOnceFormula>,
}

pub fn family_by_name(name: &str, k: Option<usize>, b: Option<&str>) -> Result<Family> {
    let bits = || -> Result<Vec<bool>> {
        let s = b.ok_or_else(|| CliError::usage(format!("family `{name}` needs --b <bits>")))?;
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(CliError::usage(format!("bad bit `{c}` in --b"))),
            })
            .collect()
    };
    let need_k = || k.ok_or_else(|| CliError::usage(format!("family `{name}` needs --k")));
    Ok(match name {
        "and" => Family::And,
        "or" => Family::Or,
        "xor" => Family::Xor,
        "kofn" => Family::KofN { k: need_k()? },
        "pairs" => Family::Pairs,
        "triples" => Family::Triples,
        "lt" | "less-than" => Family::LessThan,
        "unique" => Family::Unique { b: bits()? },
        "agree" => Family::Agree { b: bits()?, k: need_k()? },
        _ => return Err(CliError::usage(format!("unknown family `{name}`"))),
    })
}

impl FunctionSpec {
    pub fn resolve(&self) -> Result<Function> {
        let given = [self.family.is_some(), self.hex.is_some(), self.readonce.is_some(), self.random_readonce.is_some()];
        match given.iter().filter(|g| **g).count() {
            0 => return Err(CliError::usage("give one of --family, --hex, --readonce, --random-readonce")),
            1 => {}
            _ => return Err(CliError::usage("--family, --hex, --readonce and --random-readonce are exclusive")),
        }
        if let Some(name) = &self.family {
            let n = self.n.ok_or_else(|| CliError::usage("--family needs --n"))?;
            let table = family_by_name(name, self.k, self.b.as_deref())?.build(n)?;
            return Ok(Function { table, formula: None });
        }
        if let Some(hex) = &self.hex {
            let n = self.n.ok_or_else(|| CliError::usage("--hex needs --n"))?;
            let table = TruthTable::from_hex(n, hex)?;
            return Ok(Function { table, formula: None });
        }
        let formula = if let Some(text) = &self.readonce {
            match self.n {
                Some(n) => ReadOnceFormula::parse_with_arity(n, text)?,
                None => ReadOnceFormula::parse(text)?,
            }
        } else {
            let n = self.random_readonce.unwrap_or(0);
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
            random_formula(&mut rng, n, 0.3)?
        };
        Ok(Function {
            table: formula.to_truth_table()?,
            formula: Some(formula),
        })
    }
}

pub fn read_table(path: &Path) -> Result<UtilityTable> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// A recipe or an explicit table.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum GoalSpec {
    Recipe(GoalRecipe),
    Table(UtilityTable),
}

impl GoalSpec {
    pub fn table_for(&self, f: &TruthTable) -> Result<UtilityTable> {
        match self {
            GoalSpec::Recipe(r) => Ok(r.build(f)?.table),
            GoalSpec::Table(t) => Ok(t.clone()),
        }
    }
}

/// `{f, n, costs?, probs?, goal}` with rationals as strings.
#[derive(Clone, Debug, Deserialize)]
pub struct InstanceFile {
    pub f: String,
    pub n: usize,
    #[serde(default, with = "opt_rationals")]
    pub costs: Option<Vec<BigRational>>,
    #[serde(default, with = "opt_rationals")]
    pub probs: Option<Vec<BigRational>>,
    pub goal: GoalSpec,
}

mod opt_rationals {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer};

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<BigRational>>, D::Error> {
        #[derive(Deserialize)]
        struct Wrap(#[serde(with = "goalval_core::rational::vec_as_string")] Vec<BigRational>);
        Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
    }
}

impl InstanceFile {
    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }

    pub fn build(&self) -> Result<SbfeInstance> {
        let f = TruthTable::from_hex(self.n, &self.f)?;
        let g = self.goal.table_for(&f)?;
        instance(f, g, self.costs.clone(), self.probs.clone())
    }
}

pub fn instance(
    f: TruthTable,
    g: UtilityTable,
    costs: Option<Vec<BigRational>>,
    probs: Option<Vec<BigRational>>,
) -> Result<SbfeInstance> {
    let n = f.n();
    let costs = costs.unwrap_or_else(|| vec![BigRational::one(); n]);
    let probs = probs.unwrap_or_else(|| vec![rational::ratio(1, 2); n]);
    Ok(SbfeInstance::with(f, g, costs, probs)?)
}

/// Comma-separated rationals such as `1,2,1/3`.
pub fn parse_rationals(text: &str) -> Result<Vec<BigRational>> {
    text.split(',')
        .map(|t| rational::parse(t).ok_or_else(|| CliError::usage(format!("bad rational `{t}`"))))
        .collect()
}
