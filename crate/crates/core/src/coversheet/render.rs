use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::{CoverSheet, NO_HAZARDS_MARKER};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RenderFormat {
    Json,
    Markdown,
    Html,
}

impl std::str::FromStr for RenderFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(RenderFormat::Json),
            "md" | "markdown" => Ok(RenderFormat::Markdown),
            "html" => Ok(RenderFormat::Html),
            other => Err(format!("unknown format {other:?} (expected json, md or html)")),
        }
    }
}

impl RenderFormat {
    pub fn media_type(self) -> &'static str {
        match self {
            RenderFormat::Json => "application/json",
            RenderFormat::Markdown => "text/markdown; charset=utf-8",
            RenderFormat::Html => "text/html; charset=utf-8",
        }
    }
}

pub fn render(sheet: &CoverSheet, format: RenderFormat) -> String {
    match format {
        RenderFormat::Json => serde_json::to_string_pretty(sheet).expect("cover sheets serialize"),
        RenderFormat::Markdown => markdown(sheet),
        RenderFormat::Html => html(sheet),
    }
}

fn percent(v: Option<f64>) -> String {
    v.map(|p| format!("{p}")).unwrap_or_else(|| "-".into())
}

fn md_cell(s: &str) -> String {
    s.replace('|', "\\|").replace('\n', " ")
}

fn sections(list: &[u8]) -> String {
    list.iter().map(u8::to_string).collect::<Vec<_>>().join(", ")
}

fn markdown(sheet: &CoverSheet) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# Cover sheet: {}\n", md_cell(&sheet.product_name));
    let _ = writeln!(out, "- Generated: {}", sheet.generated_at.to_rfc3339());
    let _ = writeln!(out, "- General hazard list: {}", md_cell(&sheet.hgen_list));
    let _ = writeln!(out, "- Latest revisions only: {}\n", if sheet.latest_only { "yes" } else { "no" });

    out.push_str("## Source SDS\n\n| Compound | Manufacturer | Language | Revision | SDS |\n|---|---|---|---|---|\n");
    for s in &sheet.source_sds {
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {} |",
            md_cell(&s.compound_name),
            md_cell(&s.manufacturer),
            s.language,
            s.revision_date,
            s.sds_id
        );
    }

    out.push_str("\n## Composition/Ingredients\n\n| Component | CAS | Concentration (%) | Part of |\n|---|---|---|---|\n");
    for row in &sheet.composition {
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} |",
            md_cell(&row.name),
            row.cas_number.as_deref().unwrap_or("-"),
            percent(row.concentration_percent),
            row.component_of.as_deref().map(md_cell).unwrap_or_else(|| "-".into())
        );
    }

    out.push_str("\n## Pictograms\n\n");
    if sheet.pictograms.is_empty() {
        out.push_str("None\n");
    } else {
        let _ = writeln!(out, "{}", sheet.pictograms.join(", "));
    }

    out.push_str("\n## Hazards Disclosure\n\n");
    if sheet.hazards_disclosure.is_empty() {
        let _ = writeln!(out, "{NO_HAZARDS_MARKER}");
    }
    for d in &sheet.hazards_disclosure {
        let _ = writeln!(out, "- **{}** {}", d.h_code, md_cell(&d.statement_text));
    }

    out.push_str("\n## Hazard Statement(s) Overview\n\n");
    if sheet.hazard_overview.is_empty() {
        let _ = writeln!(out, "{NO_HAZARDS_MARKER}");
    } else {
        out.push_str("| Code | Statement | Classification | Compound | Manufacturer | Language | Revision | Sections |\n|---|---|---|---|---|---|---|---|\n");
        for row in &sheet.hazard_overview {
            for s in &row.sds {
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {} | {} | {} | {} | {} |",
                    row.h_code,
                    md_cell(&row.statement_text),
                    row.concept_label.as_deref().map(md_cell).unwrap_or_else(|| "-".into()),
                    md_cell(&s.compound_name),
                    md_cell(&s.manufacturer),
                    s.language,
                    s.revision_date,
                    sections(&s.sections)
                );
            }
        }
    }

    if !sheet.warnings.is_empty() {
        out.push_str("\n## Warnings\n\n");
        for w in &sheet.warnings {
            let _ = writeln!(out, "- {}", md_cell(w));
        }
    }
    out
}

fn esc(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
    out
}

fn html_table(out: &mut String, headers: &[&str], rows: impl Iterator<Item = Vec<String>>) {
    out.push_str("<table>\n<thead><tr>");
    for h in headers {
        let _ = write!(out, "<th>{}</th>", esc(h));
    }
    out.push_str("</tr></thead>\n<tbody>\n");
    for row in rows {
        out.push_str("<tr>");
        for cell in row {
            let _ = write!(out, "<td>{}</td>", esc(&cell));
        }
        out.push_str("</tr>\n");
    }
    out.push_str("</tbody>\n</table>\n");
}

fn html(sheet: &CoverSheet) -> String {
    let mut out = String::new();
    let title = format!("Cover sheet: {}", sheet.product_name);
    let _ = writeln!(
        out,
        "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>{}</title>\n</head>\n<body>",
        esc(&title)
    );
    let _ = writeln!(out, "<h1>{}</h1>", esc(&title));
    let _ = writeln!(
        out,
        "<ul>\n<li>Generated: {}</li>\n<li>General hazard list: {}</li>\n<li>Latest revisions only: {}</li>\n</ul>",
        esc(&sheet.generated_at.to_rfc3339()),
        esc(&sheet.hgen_list),
        if sheet.latest_only { "yes" } else { "no" }
    );

    out.push_str("<h2>Source SDS</h2>\n");
    html_table(
        &mut out,
        &["Compound", "Manufacturer", "Language", "Revision", "SDS"],
        sheet.source_sds.iter().map(|s| {
            vec![
                s.compound_name.clone(),
                s.manufacturer.clone(),
                s.language.clone(),
                s.revision_date.to_string(),
                s.sds_id.clone(),
            ]
        }),
    );

    out.push_str("<h2>Composition/Ingredients</h2>\n");
    html_table(
        &mut out,
        &["Component", "CAS", "Concentration (%)", "Part of"],
        sheet.composition.iter().map(|r| {
            vec![
                r.name.clone(),
                r.cas_number.clone().unwrap_or_else(|| "-".into()),
                percent(r.concentration_percent),
                r.component_of.clone().unwrap_or_else(|| "-".into()),
            ]
        }),
    );

    out.push_str("<h2>Pictograms</h2>\n<p>");
    if sheet.pictograms.is_empty() {
        out.push_str("None");
    } else {
        out.push_str(&esc(&sheet.pictograms.join(", ")));
    }
    out.push_str("</p>\n");

    out.push_str("<h2>Hazards Disclosure</h2>\n");
    if sheet.hazards_disclosure.is_empty() {
        let _ = writeln!(out, "<p>{NO_HAZARDS_MARKER}</p>");
    } else {
        out.push_str("<ul>\n");
        for d in &sheet.hazards_disclosure {
            let _ = writeln!(out, "<li><strong>{}</strong> {}</li>", esc(&d.h_code), esc(&d.statement_text));
        }
        out.push_str("</ul>\n");
    }

    out.push_str("<h2>Hazard Statement(s) Overview</h2>\n");
    if sheet.hazard_overview.is_empty() {
        let _ = writeln!(out, "<p>{NO_HAZARDS_MARKER}</p>");
    } else {
        html_table(
            &mut out,
            &["Code", "Statement", "Classification", "Compound", "Manufacturer", "Language", "Revision", "Sections"],
            sheet.hazard_overview.iter().flat_map(|row| {
                row.sds.iter().map(move |s| {
                    vec![
                        row.h_code.clone(),
                        row.statement_text.clone(),
                        row.concept_label.clone().unwrap_or_else(|| "-".into()),
                        s.compound_name.clone(),
                        s.manufacturer.clone(),
                        s.language.clone(),
                        s.revision_date.to_string(),
                        sections(&s.sections),
                    ]
                })
            }),
        );
    }

    if !sheet.warnings.is_empty() {
        out.push_str("<h2>Warnings</h2>\n<ul>\n");
        for w in &sheet.warnings {
            let _ = writeln!(out, "<li>{}</li>", esc(w));
        }
        out.push_str("</ul>\n");
    }
    out.push_str("</body>\n</html>\n");
    out
}
