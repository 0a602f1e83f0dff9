//! Concrete theories and the theory-spec parser.
//!
//! ```text
//! spec := "sets" | "boole" | "post:"INT | "mod:"INT | "gsets:"(NAME|"@"FILE)
//!       | "monoid" | "magma:"INT | "cantor:"INT
//!       | "matrix:"INT"("spec")" | "idem("spec",@"FILE")"
//! ```

mod cantor;
mod gsets;
mod modring;
mod post;
mod sets;
pub mod terms;

use std::path::Path;

pub use cantor::CantorDescriptor;
pub use gsets::{FiniteGroupTable, GSetsTheory};
pub use modring::ModRingTheory;
pub use post::{digits, PostTheory};
pub use sets::SetsTheory;
pub use terms::{bounded_automorphisms, MagmaTermTheory, MonoidTermTheory};

use crate::error::{Error, Result};
use crate::kernel::{MorphismJson, TheoryHandle};
use crate::morita::{idempotent_modification_named, matrix_theory, Idempotent};

/// Parse a theory spec and build its handle. Group tables and idempotent
/// files are read relative to the working directory.
pub fn make_theory(spec: &str) -> Result<TheoryHandle> {
    let mut p = Parser { s: spec, pos: 0 };
    let t = p.spec()?;
    if p.pos != spec.len() {
        return Err(p.error("trailing input"));
    }
    Ok(t)
}

struct Parser<'a> {
    s: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at offset {} in theory spec {:?}", self.pos, self.s))
    }

    fn rest(&self) -> &str {
        &self.s[self.pos..]
    }

    fn eat(&mut self, lit: &str) -> bool {
        if self.rest().starts_with(lit) {
            self.pos += lit.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, lit: &str) -> Result<()> {
        if self.eat(lit) {
            Ok(())
        } else {
            Err(self.error(&format!("expected {lit:?}")))
        }
    }

    fn int(&mut self) -> Result<u64> {
        let digits = self.rest().bytes().take_while(u8::is_ascii_digit).count();
        if digits == 0 {
            return Err(self.error("expected an integer"));
        }
        let n = self.rest()[..digits]
            .parse()
            .map_err(|_| self.error("integer out of range"))?;
        self.pos += digits;
        Ok(n)
    }

    fn usize(&mut self) -> Result<usize> {
        let n = self.int()?;
        usize::try_from(n).map_err(|_| self.error("integer out of range"))
    }

    /// A bare token, ending before `,` `(` `)` or the end of input.
    fn token(&mut self) -> Result<&str> {
        let len = self.rest().find([',', '(', ')']).unwrap_or(self.rest().len());
        if len == 0 {
            return Err(self.error("expected a name"));
        }
        let start = self.pos;
        self.pos += len;
        Ok(&self.s[start..self.pos])
    }

    fn spec(&mut self) -> Result<TheoryHandle> {
        let start = self.pos;
        let word_len = self.rest().bytes().take_while(u8::is_ascii_alphabetic).count();
        let word = &self.s[start..start + word_len];
        self.pos += word_len;
        match word {
            "sets" => Ok(TheoryHandle::new(SetsTheory::new())),
            "boole" => Ok(TheoryHandle::new(PostTheory::boole())),
            "monoid" => Ok(TheoryHandle::new(MonoidTermTheory::new())),
            "post" => {
                self.expect(":")?;
                Ok(TheoryHandle::new(PostTheory::new(self.usize()?)?))
            }
            "mod" => {
                self.expect(":")?;
                Ok(TheoryHandle::new(ModRingTheory::new(self.int()?)?))
            }
            "magma" => {
                self.expect(":")?;
                Ok(TheoryHandle::new(MagmaTermTheory::new(self.usize()?)?))
            }
            "cantor" => {
                self.expect(":")?;
                Ok(TheoryHandle::new(CantorDescriptor::new(self.usize()?)?))
            }
            "gsets" => {
                self.expect(":")?;
                let group = if self.eat("@") {
                    let path = self.token()?.to_string();
                    let mut g = FiniteGroupTable::load(Path::new(&path))?;
                    g.name = format!("@{path}");
                    g
                } else {
                    FiniteGroupTable::builtin(self.token()?)?
                };
                Ok(TheoryHandle::new(GSetsTheory::new(group)))
            }
            "matrix" => {
                self.expect(":")?;
                let n = self.usize()?;
                self.expect("(")?;
                let base = self.spec()?;
                self.expect(")")?;
                matrix_theory(&base, n)
            }
            "idem" => {
                self.expect("(")?;
                let base = self.spec()?;
                self.expect(",")?;
                self.expect("@")?;
                let path = self.token()?.to_string();
                self.expect(")")?;
                let u = load_idempotent(&base, Path::new(&path))?;
                idempotent_modification_named(&u, self.s[start..self.pos].to_string())
            }
            "" => Err(self.error("expected a theory name")),
            other => Err(Error::Parse(format!("unknown theory {other:?} in {:?}", self.s))),
        }
    }
}

/// Read a morphism `T_1 -> T_1` of `base` from a JSON file and check it is idempotent.
pub fn load_idempotent(base: &TheoryHandle, path: &Path) -> Result<Idempotent> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let json: MorphismJson = serde_json::from_str(&text)?;
    if json.src != 1 || json.dst != 1 {
        return Err(Error::RankMismatch(format!(
            "idempotent file must describe a morphism 1->1, got {}->{}",
            json.src, json.dst
        )));
    }
    let u = base.decode(&json)?;
    Idempotent::new(base, u)
}
