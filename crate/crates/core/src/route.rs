//! Cascade topologies and the photons they emit.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// A photon of the cascade. Primes count the ensemble stage that emitted it:
/// `s`/`i` come from the first ensemble, `s'`/`i'` from the second and
/// `s''`/`i''` from the third.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Photon {
    S,
    I,
    SPrime,
    IPrime,
    SDouble,
    IDouble,
}

impl Photon {
    pub const ALL: [Photon; 6] = [
        Photon::S,
        Photon::I,
        Photon::SPrime,
        Photon::IPrime,
        Photon::SDouble,
        Photon::IDouble,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Photon::S => "s",
            Photon::I => "i",
            Photon::SPrime => "s'",
            Photon::IPrime => "i'",
            Photon::SDouble => "s''",
            Photon::IDouble => "i''",
        }
    }

    /// Quote-free spelling, convenient in config keys and shells.
    pub fn ascii_label(self) -> &'static str {
        match self {
            Photon::S => "s",
            Photon::I => "i",
            Photon::SPrime => "sp",
            Photon::IPrime => "ip",
            Photon::SDouble => "spp",
            Photon::IDouble => "ipp",
        }
    }
}

impl fmt::Display for Photon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl From<Photon> for String {
    fn from(p: Photon) -> Self {
        p.label().to_owned()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsePhotonError(pub String);

impl fmt::Display for ParsePhotonError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "unknown photon `{}` (expected one of s, i, s', i', s'', i'' or sp, ip, spp, ipp)",
            self.0
        )
    }
}

impl std::error::Error for ParsePhotonError {}

impl FromStr for Photon {
    type Err = ParsePhotonError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().replace('′', "'").replace('″', "''");
        match norm.as_str() {
            "s" => Ok(Photon::S),
            "i" => Ok(Photon::I),
            "s'" | "sp" => Ok(Photon::SPrime),
            "i'" | "ip" => Ok(Photon::IPrime),
            "s''" | "spp" => Ok(Photon::SDouble),
            "i''" | "ipp" => Ok(Photon::IDouble),
            _ => Err(ParsePhotonError(s.to_owned())),
        }
    }
}

impl TryFrom<String> for Photon {
    type Error = ParsePhotonError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

/// Which photons of the seed pair get converted downstream, and hence which
/// closed-form spectral function describes the emitted state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Route {
    /// The seed pair from a single ensemble.
    Biphoton,
    /// Idler of the seed converted in a second ensemble.
    B1,
    /// Signal of the seed converted in a second ensemble.
    B2,
    C1,
    C2,
    C3,
    C4,
    C5,
}

impl Route {
    pub const ALL: [Route; 8] = [
        Route::Biphoton,
        Route::B1,
        Route::B2,
        Route::C1,
        Route::C2,
        Route::C3,
        Route::C4,
        Route::C5,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Route::Biphoton => "BIPHOTON",
            Route::B1 => "B1",
            Route::B2 => "B2",
            Route::C1 => "C1",
            Route::C2 => "C2",
            Route::C3 => "C3",
            Route::C4 => "C4",
            Route::C5 => "C5",
        }
    }

    /// Photons of the emitted state, in the order detunings are passed to the
    /// evaluators.
    pub fn photon_labels(self) -> &'static [Photon] {
        use Photon::*;
        match self {
            Route::Biphoton => &[S, I],
            Route::B1 => &[S, SPrime, IPrime],
            Route::B2 => &[I, SPrime, IPrime],
            Route::C1 => &[S, SPrime, SDouble, IDouble],
            Route::C2 => &[S, IPrime, SDouble, IDouble],
            Route::C3 => &[SPrime, IPrime, SDouble, IDouble],
            Route::C4 => &[I, SPrime, SDouble, IDouble],
            Route::C5 => &[I, IPrime, SDouble, IDouble],
        }
    }

    pub fn arity(self) -> usize {
        self.photon_labels().len()
    }

    /// Position of `photon` in [`Route::photon_labels`].
    pub fn index_of(self, photon: Photon) -> Option<usize> {
        self.photon_labels().iter().position(|&p| p == photon)
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl From<Route> for String {
    fn from(r: Route) -> Self {
        r.name().to_owned()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRouteError(pub String);

impl fmt::Display for ParseRouteError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "unknown route `{}` (valid routes: BIPHOTON, B1, B2, C1, C2, C3, C4, C5)",
            self.0
        )
    }
}

impl std::error::Error for ParseRouteError {}

impl FromStr for Route {
    type Err = ParseRouteError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let upper = s.trim().to_ascii_uppercase();
        Route::ALL
            .into_iter()
            .find(|r| r.name() == upper)
            .ok_or_else(|| ParseRouteError(s.to_owned()))
    }
}

impl TryFrom<String> for Route {
    type Error = ParseRouteError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_match_state_definitions() {
        let labels = |r: Route| -> Vec<&str> { r.photon_labels().iter().map(|p| p.label()).collect() };
        assert_eq!(labels(Route::Biphoton), ["s", "i"]);
        assert_eq!(labels(Route::B1), ["s", "s'", "i'"]);
        assert_eq!(labels(Route::B2), ["i", "s'", "i'"]);
        assert_eq!(labels(Route::C1), ["s", "s'", "s''", "i''"]);
        assert_eq!(labels(Route::C2), ["s", "i'", "s''", "i''"]);
        assert_eq!(labels(Route::C3), ["s'", "i'", "s''", "i''"]);
        assert_eq!(labels(Route::C4), ["i", "s'", "s''", "i''"]);
        assert_eq!(labels(Route::C5), ["i", "i'", "s''", "i''"]);
    }

    #[test]
    fn arity_is_label_count() {
        for r in Route::ALL {
            assert_eq!(r.arity(), r.photon_labels().len());
            assert!((2..=4).contains(&r.arity()));
        }
    }

    #[test]
    fn parse_round_trip() {
        for r in Route::ALL {
            assert_eq!(r.name().parse::<Route>().unwrap(), r);
        }
        assert_eq!("b1".parse::<Route>().unwrap(), Route::B1);
        let err = "C9".parse::<Route>().unwrap_err().to_string();
        assert!(err.contains("C5") && err.contains("BIPHOTON"));

        for p in Photon::ALL {
            assert_eq!(p.label().parse::<Photon>().unwrap(), p);
            assert_eq!(p.ascii_label().parse::<Photon>().unwrap(), p);
        }
        assert_eq!("s″".parse::<Photon>().unwrap(), Photon::SDouble);
        assert!("x".parse::<Photon>().is_err());
    }
}
