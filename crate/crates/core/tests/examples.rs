//! Every example must run to completion.

macro_rules! example {
    ($name:ident) => {
        mod $name {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", stringify!($name), ".rs"));

            #[test]
            fn runs() {
                main().expect(concat!(stringify!($name), " failed"));
            }
        }
    };
}

example!(gas_diagnostics);
example!(cross_sections);
example!(relaxation);
example!(first_order_response);
example!(decay_comparison);
example!(monte_carlo);
example!(waveform_moments);
