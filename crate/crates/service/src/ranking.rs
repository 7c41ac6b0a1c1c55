use sdskg::store::CatalogEntry;

/// Largest edit distance a fuzzy match may have.
pub const MAX_EDIT_DISTANCE: usize = 2;

/// How well a field matches a filter; smaller is better.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum MatchRank {
    /// The field starts with the filter, case included.
    Prefix,
    /// The field contains the filter ignoring case.
    Substring,
    /// Some word or leading slice of the field is within the edit distance.
    Fuzzy(usize),
}

fn fuzzy_distance(field: &str, filter: &str) -> Option<usize> {
    let n = filter.chars().count();
    // Short filters would match almost anything.
    if n <= MAX_EDIT_DISTANCE {
        return None;
    }
    let mut candidates: Vec<String> = field
        .split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_string)
        .collect();
    for len in n.saturating_sub(1)..=n + 1 {
        candidates.push(field.chars().take(len).collect());
    }
    candidates
        .iter()
        .map(|c| strsim::levenshtein(c, filter))
        .min()
        .filter(|d| *d <= MAX_EDIT_DISTANCE)
}

pub fn match_rank(field: &str, filter: &str) -> Option<MatchRank> {
    let filter = filter.trim();
    if field.starts_with(filter) {
        return Some(MatchRank::Prefix);
    }
    let (field, filter) = (field.to_lowercase(), filter.to_lowercase());
    if field.contains(&filter) {
        return Some(MatchRank::Substring);
    }
    fuzzy_distance(&field, &filter).map(MatchRank::Fuzzy)
}

fn entry_rank(entry: &CatalogEntry, filter: &str) -> Option<MatchRank> {
    [match_rank(&entry.compound_name, filter), match_rank(&entry.manufacturer, filter)]
        .into_iter()
        .flatten()
        .min()
}

/// Orders catalog entries by match rank against compound name and
/// manufacturer, dropping non-matches. Ties keep catalog order, which is
/// lexicographic. An empty filter returns the catalog unchanged.
pub fn rank_catalog(catalog: Vec<CatalogEntry>, filter: &str, limit: Option<usize>) -> Vec<CatalogEntry> {
    let mut ranked: Vec<(MatchRank, CatalogEntry)> = catalog
        .into_iter()
        .filter_map(|e| entry_rank(&e, filter).map(|r| (r, e)))
        .collect();
    ranked.sort_by_key(|a| a.0);
    ranked
        .into_iter()
        .map(|(_, e)| e)
        .take(limit.unwrap_or(usize::MAX))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks() {
        assert_eq!(match_rank("Acetomenophin 400", "Aceto"), Some(MatchRank::Prefix));
        assert_eq!(match_rank("Acetomenophin 400", "aceto"), Some(MatchRank::Substring));
        assert_eq!(match_rank("Acetomenophin 400", "menophin"), Some(MatchRank::Substring));
        assert_eq!(match_rank("Acetomenophin 400", "acetomenophen"), Some(MatchRank::Fuzzy(1)));
        assert_eq!(match_rank("Acetaminophen", "aceto"), Some(MatchRank::Fuzzy(1)));
        assert_eq!(match_rank("Ethanol", "aceto"), None);
        assert_eq!(match_rank("Ethanol", "xy"), None);
        assert_eq!(match_rank("Ethanol", ""), Some(MatchRank::Prefix));
    }
}
