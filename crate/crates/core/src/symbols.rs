//! Interned string identifiers.
//!
//! Concept names, role names, constants, and query variables are all
//! lightweight copies of indices into a global append-only string table.
//! Interning gives O(1) equality/hash and keeps every other data structure
//! `Copy`-friendly.

use once_cell::sync::Lazy;
use std::collections::HashMap;
use std::fmt;
use std::sync::RwLock;

/// An interned string. Two `Symbol`s are equal iff their texts are equal.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(u32);

struct SymbolTable {
    texts: Vec<String>,
    index: HashMap<String, u32>,
}

static SYMBOLS: Lazy<RwLock<SymbolTable>> = Lazy::new(|| {
    RwLock::new(SymbolTable {
        texts: Vec::new(),
        index: HashMap::new(),
    })
});

impl Symbol {
    pub fn intern(text: &str) -> Symbol {
        if let Some(&id) = SYMBOLS.read().unwrap().index.get(text) {
            return Symbol(id);
        }
        let mut table = SYMBOLS.write().unwrap();
        if let Some(&id) = table.index.get(text) {
            return Symbol(id);
        }
        let id = table.texts.len() as u32;
        table.texts.push(text.to_owned());
        table.index.insert(text.to_owned(), id);
        Symbol(id)
    }

    pub fn text(self) -> String {
        SYMBOLS.read().unwrap().texts[self.0 as usize].clone()
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.text())
    }
}

macro_rules! symbol_newtype {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(pub Symbol);

        impl $name {
            pub fn new(text: &str) -> Self {
                $name(Symbol::intern(text))
            }

            pub fn text(self) -> String {
                self.0.text()
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.text())
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.text())
            }
        }
    };
}

symbol_newtype!(
    /// A unary predicate (concept name).
    ConceptName
);
symbol_newtype!(
    /// A binary predicate (role name). Inversion lives in [`crate::model::Role`].
    RoleName
);
symbol_newtype!(
    /// A database constant.
    Const
);
symbol_newtype!(
    /// A query variable.
    Var
);

/// `Ord` on newtypes above is interning order (fast, deterministic within a
/// process). Use this for user-facing orderings that must follow the text.
pub fn by_text<T: Copy + Into<Symbol>>(items: &mut Vec<T>) {
    items.sort_by_key(|s| (*s).into().text());
}

impl From<ConceptName> for Symbol {
    fn from(v: ConceptName) -> Symbol {
        v.0
    }
}
impl From<RoleName> for Symbol {
    fn from(v: RoleName) -> Symbol {
        v.0
    }
}
impl From<Const> for Symbol {
    fn from(v: Const) -> Symbol {
        v.0
    }
}
impl From<Var> for Symbol {
    fn from(v: Var) -> Symbol {
        v.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interning_is_stable() {
        let a = Symbol::intern("hello");
        let b = Symbol::intern("hello");
        let c = Symbol::intern("world");
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.text(), "hello");
    }

    #[test]
    fn newtypes_do_not_unify() {
        let a = ConceptName::new("A");
        let r = RoleName::new("A");
        assert_eq!(a.text(), r.text());
        // Different newtypes: no accidental cross-kind equality at type level.
        assert_eq!(a.0, r.0);
    }

    #[test]
    fn by_text_sorts_lexicographically() {
        let mut v = vec![Const::new("zebra"), Const::new("apple")];
        by_text(&mut v);
        assert_eq!(v[0].text(), "apple");
    }
}
