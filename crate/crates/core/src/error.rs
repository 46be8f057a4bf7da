use std::fmt;

/// Coarse error category, stable across releases so scripts can branch on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    Input,
    Format,
    Capability,
    Numeric,
    Io,
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Category::Input => "input",
            Category::Format => "format",
            Category::Capability => "capability",
            Category::Numeric => "numeric",
            Category::Io => "io",
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0}")]
    Input(String),

    #[error("{0}")]
    Format(String),

    /// An edge does not fit inside the requested band.
    #[error("edge ({u}, {v}) has stretch {stretch} which exceeds band width {width}")]
    BandOverflow {
        u: usize,
        v: usize,
        stretch: usize,
        width: usize,
    },

    #[error("{0}")]
    Capability(String),

    #[error("{0}")]
    Numeric(String),

    #[error("line {line}: {detail}")]
    Line { line: usize, detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn category(&self) -> Category {
        match self {
            Error::Input(_) => Category::Input,
            Error::Format(_) | Error::Line { .. } => Category::Format,
            Error::BandOverflow { .. } | Error::Capability(_) => Category::Capability,
            Error::Numeric(_) => Category::Numeric,
            Error::Io(_) => Category::Io,
        }
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
