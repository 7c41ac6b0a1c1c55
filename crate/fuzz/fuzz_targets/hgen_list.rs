#![no_main]

use libfuzzer_sys::fuzz_target;
use sdskg::coversheet::GeneralHazardList;

fuzz_target!(|data: &str| {
    if let Ok(list) = GeneralHazardList::parse(data) {
        assert_eq!(GeneralHazardList::parse(&list.to_text()).expect("reparse"), list);
    }
});
