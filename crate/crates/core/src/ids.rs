//! Identifier newtypes for articles, journals and usage actors.

use std::borrow::Borrow;
use std::fmt;

use serde::{Deserialize, Serialize};

macro_rules! string_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(String);

        impl $name {
            /// Wraps `value`, rejecting the empty string.
            pub fn new(value: impl Into<String>) -> Option<Self> {
                let value = value.into();
                if value.is_empty() {
                    None
                } else {
                    Some(Self(value))
                }
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }

        impl AsRef<str> for $name {
            fn as_ref(&self) -> &str {
                &self.0
            }
        }

        impl From<&str> for $name {
            /// Panics on the empty string; intended for literals and tests.
            fn from(value: &str) -> Self {
                Self::new(value).expect(concat!(stringify!($name), " must be non-empty"))
            }
        }
    };
}

string_id!(
    /// Identifier of an article, also used for dangling reference targets.
    ArticleId
);
string_id!(
    /// Identifier of a journal.
    JournalId
);
string_id!(
    /// Identifier of a usage-log actor (a user, IP or resolver client).
    ActorId
);
