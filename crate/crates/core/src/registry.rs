//! Named suites available to the command line and bindings.

use std::sync::Arc;

use crate::error::ConfigError;
use crate::pipeline::Suite;
use crate::suites::{elementary, factorization, fourier, notation, vm};

/// Every built-in suite, in listing order.
pub fn registry() -> Vec<Arc<dyn Suite>> {
    vec![
        Arc::new(elementary::sine_forward_suite()),
        Arc::new(elementary::sine_backward_suite()),
        Arc::new(elementary::reciprocal_integrated_suite()),
        Arc::new(fourier::fourier_suite()),
        Arc::new(factorization::factorization_suite()),
        Arc::new(factorization::factorization_suite_with(
            factorization::FactorProfile::Strict,
        )),
        Arc::new(notation::notation_suite()),
        Arc::new(vm::vm_suite()),
    ]
}

pub fn find_suite(name: &str) -> Result<Arc<dyn Suite>, ConfigError> {
    registry()
        .into_iter()
        .find(|s| s.name() == name)
        .ok_or_else(|| ConfigError::UnknownSuite(name.to_owned()))
}

/// One listing line: `name  mode  variant,variant`.
pub fn listing_line(suite: &dyn Suite) -> String {
    format!(
        "{:<22}{:<12}{}",
        suite.name(),
        suite.mode(),
        suite.variant_ids().join(",")
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::ModeTag;

    #[test]
    fn contents_and_modes() {
        let expected = [
            ("sine_forward", ModeTag::Forward),
            ("sine_backward", ModeTag::Backward),
            ("reciprocal", ModeTag::Integrated),
            ("fourier", ModeTag::Integrated),
            ("factorization", ModeTag::Forward),
            ("notation", ModeTag::Integrated),
            ("vm", ModeTag::Backward),
        ];
        for (name, mode) in expected {
            let s = find_suite(name).unwrap();
            assert_eq!(s.mode(), mode, "{name}");
            assert!(s.has_variant("correct"));
            assert!(s.variant_ids().len() >= 2);
        }
        assert_eq!(
            find_suite("nosuch").err(),
            Some(ConfigError::UnknownSuite("nosuch".into()))
        );
    }
}
