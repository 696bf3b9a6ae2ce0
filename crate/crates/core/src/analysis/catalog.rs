//! Effects and cell semantics of FunC standard-library functions.
//!
//! The built-in table can be extended or overridden from a JSON file of the
//! form `{"name": {"args": 2, "rets": 1, "effects": ["Throws"],
//! "cellOp": {"op": "load", "kind": "uint", "width": {"arg": 1}},
//! "modifying": true}}`. An optional `"sink": {"index": 2}` or
//! `{"seed": 0}` marks the argument as a taint sink.

use std::collections::BTreeMap;
use std::fmt;

use bitflags::bitflags;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::cells::FieldKind;

bitflags! {
    #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
    pub struct Effects: u16 {
        const STORAGE_WRITE = 1 << 0;
        const MESSAGE_SEND = 1 << 1;
        const THROWS = 1 << 2;
        const GLOBAL_WRITE = 1 << 3;
        const ENV_READ = 1 << 4;
        const LOGICAL_TIME_SOURCE = 1 << 5;
        const RANDOMNESS_API = 1 << 6;
    }
}

const EFFECT_NAMES: [(&str, Effects); 7] = [
    ("StorageWrite", Effects::STORAGE_WRITE),
    ("MessageSend", Effects::MESSAGE_SEND),
    ("Throws", Effects::THROWS),
    ("GlobalWrite", Effects::GLOBAL_WRITE),
    ("EnvRead", Effects::ENV_READ),
    ("LogicalTimeSource", Effects::LOGICAL_TIME_SOURCE),
    ("RandomnessApi", Effects::RANDOMNESS_API),
];

impl Effects {
    /// Effects that make a function unsafe to call without `impure`.
    pub const SIDE_EFFECTS: Effects = Effects::THROWS
        .union(Effects::MESSAGE_SEND)
        .union(Effects::STORAGE_WRITE)
        .union(Effects::GLOBAL_WRITE);

    pub fn names(self) -> Vec<&'static str> {
        EFFECT_NAMES.iter().filter(|(_, e)| self.contains(*e)).map(|(n, _)| *n).collect()
    }
}

impl Serialize for Effects {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.names().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Effects {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let names = Vec::<String>::deserialize(d)?;
        let mut out = Effects::empty();
        for n in names {
            let (_, e) = EFFECT_NAMES
                .iter()
                .find(|(name, _)| *name == n)
                .ok_or_else(|| D::Error::custom(format!("unknown effect `{n}`")))?;
            out |= *e;
        }
        Ok(out)
    }
}

/// Where a width comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WidthSpec {
    Fixed(u32),
    /// Index into the argument list; the receiver of a method call is
    /// argument 0.
    Arg(usize),
    Variable,
}

/// How a builtin acts on builders, cells and slices. Argument 0 is the
/// builder or slice operated on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum CellOp {
    BeginCell,
    /// Append a field; the stored value is argument 1.
    Store { kind: FieldKind, width: WidthSpec },
    /// `store_slice`: records a message address when the slice is one.
    StoreSlice,
    /// `store_builder`: appends the other builder's fields.
    StoreBuilder,
    EndCell,
    BeginParse,
    /// Consume a field; returns `(slice, value)`.
    Load { kind: FieldKind, width: WidthSpec },
    /// Read a field without consuming it.
    Preload { kind: FieldKind, width: WidthSpec },
    /// Consume a field; returns only the slice.
    Skip { kind: FieldKind, width: WidthSpec },
    EndParse,
    GetData,
    SetData,
    /// `send_raw_message`: the message cell is argument 0.
    Send,
    /// Returns an address slice, e.g. `my_address`.
    MakeAddr,
    /// Queries such as `slice_bits` that neither read nor write fields.
    Inspect,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sink {
    /// Seeds the random generator with the given argument.
    Seed(usize),
    /// Uses the given argument as a dictionary key or tuple index.
    Index(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct BuiltinSpec {
    #[serde(default)]
    pub args: u8,
    #[serde(default)]
    pub rets: u8,
    #[serde(default)]
    pub effects: Effects,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cell_op: Option<CellOp>,
    #[serde(default)]
    pub modifying: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sink: Option<Sink>,
}

impl BuiltinSpec {
    fn new(args: u8, rets: u8, effects: Effects) -> Self {
        BuiltinSpec { args, rets, effects, cell_op: None, modifying: false, sink: None }
    }

    fn cell(mut self, op: CellOp) -> Self {
        self.cell_op = Some(op);
        self
    }

    fn modifying(mut self) -> Self {
        self.modifying = true;
        self
    }

    fn sink(mut self, s: Sink) -> Self {
        self.sink = Some(s);
        self
    }

    /// A randomness API call whose result is a random number (not a seeding
    /// call).
    pub fn is_random_source(&self) -> bool {
        self.effects.contains(Effects::RANDOMNESS_API) && self.sink.is_none() && self.rets > 0
    }
}

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("invalid catalog override: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Catalog {
    entries: BTreeMap<String, BuiltinSpec>,
}

impl Default for Catalog {
    fn default() -> Self {
        Catalog::builtin()
    }
}

impl Catalog {
    pub fn get(&self, name: &str) -> Option<&BuiltinSpec> {
        self.entries.get(name).or_else(|| name.strip_prefix('~').and_then(|n| self.entries.get(n)))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.get(name).is_some()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &BuiltinSpec)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn insert(&mut self, name: impl Into<String>, spec: BuiltinSpec) {
        self.entries.insert(name.into(), spec);
    }

    /// Apply a JSON override; entries replace built-ins by name.
    pub fn apply_overrides(&mut self, json: &str) -> Result<(), CatalogError> {
        let extra: BTreeMap<String, BuiltinSpec> = serde_json::from_str(json)?;
        self.entries.extend(extra);
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.entries).expect("catalog serializes")
    }

    pub fn builtin() -> Self {
        use CellOp::*;
        use FieldKind as K;
        use WidthSpec::*;
        let none = Effects::empty();
        let env = Effects::ENV_READ;
        let throws = Effects::THROWS;
        let mut c = Catalog { entries: BTreeMap::new() };
        let mut add = |name: &str, spec: BuiltinSpec| {
            c.entries.insert(name.to_string(), spec);
        };

        // Environment.
        for name in ["now", "get_balance", "config_param", "get_seed", "cur_time"] {
            add(name, BuiltinSpec::new(0, 1, env));
        }
        for name in ["cur_lt", "block_lt"] {
            add(name, BuiltinSpec::new(0, 1, env | Effects::LOGICAL_TIME_SOURCE));
        }
        add("my_address", BuiltinSpec::new(0, 1, env).cell(MakeAddr));
        add("get_data", BuiltinSpec::new(0, 1, env).cell(GetData));
        add("set_data", BuiltinSpec::new(1, 0, Effects::STORAGE_WRITE).cell(SetData));
        add("commit", BuiltinSpec::new(0, 0, Effects::STORAGE_WRITE));
        add("set_code", BuiltinSpec::new(1, 0, Effects::STORAGE_WRITE));
        for name in ["accept_message", "set_gas_limit", "buy_gas"] {
            add(name, BuiltinSpec::new(0, 0, none));
        }

        // Messages and actions.
        add("send_raw_message", BuiltinSpec::new(2, 0, Effects::MESSAGE_SEND).cell(Send));
        add("raw_reserve", BuiltinSpec::new(2, 0, Effects::MESSAGE_SEND));
        add("raw_reserve_extra", BuiltinSpec::new(3, 0, Effects::MESSAGE_SEND));

        // Exceptions.
        add("throw", BuiltinSpec::new(1, 0, throws));
        add("throw_if", BuiltinSpec::new(2, 0, throws));
        add("throw_unless", BuiltinSpec::new(2, 0, throws));
        add("throw_arg", BuiltinSpec::new(2, 0, throws));
        add("throw_arg_if", BuiltinSpec::new(3, 0, throws));
        add("throw_arg_unless", BuiltinSpec::new(3, 0, throws));

        // Randomness.
        add("random", BuiltinSpec::new(0, 1, Effects::RANDOMNESS_API));
        add("rand", BuiltinSpec::new(1, 1, Effects::RANDOMNESS_API));
        add("set_seed", BuiltinSpec::new(1, 0, Effects::RANDOMNESS_API).sink(Sink::Seed(0)));
        add("randomize", BuiltinSpec::new(1, 0, Effects::RANDOMNESS_API).sink(Sink::Seed(0)));
        // Seeds from the logical time itself.
        add(
            "randomize_lt",
            BuiltinSpec::new(0, 0, Effects::RANDOMNESS_API | Effects::LOGICAL_TIME_SOURCE).sink(Sink::Seed(0)),
        );

        // Builders.
        add("begin_cell", BuiltinSpec::new(0, 1, none).cell(BeginCell));
        add("end_cell", BuiltinSpec::new(1, 1, none).cell(EndCell));
        add("store_uint", BuiltinSpec::new(3, 1, none).cell(Store { kind: K::Uint, width: Arg(2) }));
        add("store_int", BuiltinSpec::new(3, 1, none).cell(Store { kind: K::Int, width: Arg(2) }));
        for name in ["store_coins", "store_grams", "store_varuint16"] {
            add(name, BuiltinSpec::new(2, 1, none).cell(Store { kind: K::Coins, width: Variable }));
        }
        add("store_ref", BuiltinSpec::new(2, 1, none).cell(Store { kind: K::Ref, width: Variable }));
        for name in ["store_dict", "store_maybe_ref"] {
            add(name, BuiltinSpec::new(2, 1, none).cell(Store { kind: K::Dict, width: Variable }));
        }
        add("store_slice", BuiltinSpec::new(2, 1, none).cell(StoreSlice));
        add("store_builder", BuiltinSpec::new(2, 1, none).cell(StoreBuilder));
        for name in ["builder_bits", "builder_refs", "builder_depth"] {
            add(name, BuiltinSpec::new(1, 1, none).cell(Inspect));
        }

        // Slices.
        add("begin_parse", BuiltinSpec::new(1, 1, none).cell(BeginParse));
        add("end_parse", BuiltinSpec::new(1, 0, throws).cell(EndParse));
        let load = |kind, width| BuiltinSpec::new(2, 2, none).cell(Load { kind, width }).modifying();
        add("load_uint", load(K::Uint, Arg(1)));
        add("load_int", load(K::Int, Arg(1)));
        add("load_bits", load(K::Bits, Arg(1)));
        for name in ["load_coins", "load_grams", "load_varuint16"] {
            add(name, load(K::Coins, Variable));
        }
        add("load_msg_addr", load(K::MsgAddr, Variable));
        add("load_ref", load(K::Ref, Variable));
        for name in ["load_dict", "load_maybe_ref"] {
            add(name, load(K::Dict, Variable));
        }
        let preload = |kind, width| BuiltinSpec::new(2, 1, none).cell(Preload { kind, width });
        add("preload_uint", preload(K::Uint, Arg(1)));
        add("preload_int", preload(K::Int, Arg(1)));
        add("preload_bits", preload(K::Bits, Arg(1)));
        add("preload_ref", preload(K::Ref, Variable));
        for name in ["preload_dict", "preload_maybe_ref"] {
            add(name, preload(K::Dict, Variable));
        }
        add("skip_bits", BuiltinSpec::new(2, 1, none).cell(Skip { kind: K::Bits, width: Arg(1) }).modifying());
        for name in ["skip_dict", "skip_maybe_ref"] {
            add(name, BuiltinSpec::new(1, 1, none).cell(Skip { kind: K::Dict, width: Variable }).modifying());
        }
        for name in [
            "slice_bits",
            "slice_refs",
            "slice_bits_refs",
            "slice_empty?",
            "slice_data_empty?",
            "slice_refs_empty?",
            "slice_depth",
            "first_bit",
            "cell_depth",
            "dict_empty?",
            "cell_null?",
        ] {
            add(name, BuiltinSpec::new(1, 1, none).cell(Inspect));
        }
        for name in ["parse_std_addr", "parse_var_addr", "force_chain"] {
            add(name, BuiltinSpec::new(1, 1, none));
        }

        // Hashes and signatures.
        for name in ["cell_hash", "slice_hash", "string_hash"] {
            add(name, BuiltinSpec::new(1, 1, none));
        }
        add("check_signature", BuiltinSpec::new(3, 1, none));
        add("check_data_signature", BuiltinSpec::new(3, 1, none));
        add("equal_slice_bits", BuiltinSpec::new(2, 1, none));
        add("equal_slices", BuiltinSpec::new(2, 1, none));

        // Arithmetic.
        for name in ["min", "max"] {
            add(name, BuiltinSpec::new(2, 1, none));
        }
        add("minmax", BuiltinSpec::new(2, 2, none));
        add("abs", BuiltinSpec::new(1, 1, none));
        for name in ["muldiv", "muldivr", "muldivc"] {
            add(name, BuiltinSpec::new(3, 1, none));
        }
        add("muldivmod", BuiltinSpec::new(3, 2, none));

        // Dictionaries: the key argument is an index sink.
        for name in [
            "udict_get?", "idict_get?", "udict_get_ref?", "idict_get_ref?", "dict_get?", "udict_delete?",
            "idict_delete?", "udict_delete_get?", "idict_delete_get?", "udict_get_next?", "idict_get_next?",
            "udict_get_prev?", "idict_get_prev?", "udict_get_nexteq?", "udict_get_preveq?",
        ] {
            add(name, BuiltinSpec::new(3, 2, none).sink(Sink::Index(2)));
        }
        for name in ["udict_get_ref", "idict_get_ref"] {
            add(name, BuiltinSpec::new(3, 1, none).sink(Sink::Index(2)));
        }
        for name in [
            "udict_set", "idict_set", "dict_set", "udict_set_ref", "idict_set_ref", "udict_set_builder",
            "idict_set_builder", "udict_add?", "udict_replace?", "idict_add?", "idict_replace?",
            "udict_add_builder?", "udict_replace_builder?",
        ] {
            add(name, BuiltinSpec::new(4, 1, none).sink(Sink::Index(2)).modifying());
        }
        for name in ["udict_get_min?", "udict_get_max?", "idict_get_min?", "idict_get_max?"] {
            add(name, BuiltinSpec::new(2, 3, none));
        }
        for name in ["udict::delete_get_min", "idict::delete_get_min", "udict::delete_get_max"] {
            add(name, BuiltinSpec::new(2, 4, none).modifying());
        }
        add("new_dict", BuiltinSpec::new(0, 1, none));

        // Tuples and nulls.
        add("at", BuiltinSpec::new(2, 1, none).sink(Sink::Index(1)));
        for name in ["first", "second", "third", "fourth", "car", "cdr", "unsingle", "tuple_length", "null?"] {
            add(name, BuiltinSpec::new(1, 1, none));
        }
        add("tpush", BuiltinSpec::new(2, 1, none).modifying());
        add("cons", BuiltinSpec::new(2, 1, none));
        add("pair", BuiltinSpec::new(2, 1, none));
        add("unpair", BuiltinSpec::new(1, 2, none));
        add("empty_tuple", BuiltinSpec::new(0, 1, none));
        add("null", BuiltinSpec::new(0, 1, none));

        // Debugging.
        for name in ["dump", "strdump"] {
            add(name, BuiltinSpec::new(1, 1, none).modifying());
        }
        c
    }
}

impl fmt::Display for Effects {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.names().join("|"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_symbols_have_expected_effects() {
        let c = Catalog::builtin();
        assert!(c.get("cur_lt").unwrap().effects.contains(Effects::LOGICAL_TIME_SOURCE));
        assert!(c.get("block_lt").unwrap().effects.contains(Effects::LOGICAL_TIME_SOURCE));
        assert!(!c.get("now").unwrap().effects.contains(Effects::LOGICAL_TIME_SOURCE));
        assert!(c.get("now").unwrap().effects.contains(Effects::ENV_READ));
        for name in ["rand", "set_seed", "randomize"] {
            assert!(c.get(name).unwrap().effects.contains(Effects::RANDOMNESS_API), "{name}");
        }
        assert!(c.get("set_data").unwrap().effects.contains(Effects::STORAGE_WRITE));
        assert!(c.get("send_raw_message").unwrap().effects.contains(Effects::MESSAGE_SEND));
        assert!(c.get("throw_unless").unwrap().effects.contains(Effects::THROWS));
        assert!(c.get("rand").unwrap().is_random_source());
        assert!(!c.get("set_seed").unwrap().is_random_source());
        // `~name` resolves to the plain builtin.
        assert!(c.get("~load_uint").is_some());
    }

    #[test]
    fn override_replaces_and_adds() {
        let mut c = Catalog::builtin();
        c.apply_overrides(
            r#"{
                "now": {"args": 0, "rets": 1, "effects": ["EnvRead", "LogicalTimeSource"]},
                "load_op": {"args": 1, "rets": 2, "cellOp": {"op": "load", "kind": "uint", "width": {"fixed": 32}}, "modifying": true}
            }"#,
        )
        .unwrap();
        assert!(c.get("now").unwrap().effects.contains(Effects::LOGICAL_TIME_SOURCE));
        assert_eq!(
            c.get("load_op").unwrap().cell_op,
            Some(CellOp::Load { kind: FieldKind::Uint, width: WidthSpec::Fixed(32) })
        );
    }

    #[test]
    fn bad_override_is_an_error() {
        let mut c = Catalog::builtin();
        assert!(c.apply_overrides(r#"{"x": {"effects": ["Teleport"]}}"#).is_err());
        assert!(c.apply_overrides("[1, 2]").is_err());
    }

    #[test]
    fn json_round_trip() {
        let c = Catalog::builtin();
        let mut d = Catalog { entries: BTreeMap::new() };
        d.apply_overrides(&c.to_json()).unwrap();
        assert_eq!(c, d);
    }
}
