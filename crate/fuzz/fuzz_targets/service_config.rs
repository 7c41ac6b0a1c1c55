#![no_main]

use libfuzzer_sys::fuzz_target;
use sdskg_service::ServiceConfig;

fuzz_target!(|data: &str| {
    let _ = ServiceConfig::parse(data, std::path::Path::new("/"));
});
