//! Namespace constants used across the crate.

pub mod rdf {
    pub const NS: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
    pub const TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
    pub const LANG_STRING: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";
    pub const FIRST: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#first";
    pub const REST: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#rest";
    pub const NIL: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#nil";
}

pub mod rdfs {
    pub const NS: &str = "http://www.w3.org/2000/01/rdf-schema#";
    pub const SUB_CLASS_OF: &str = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
    pub const LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";
}

pub mod xsd {
    pub const NS: &str = "http://www.w3.org/2001/XMLSchema#";
    pub const STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
    pub const BOOLEAN: &str = "http://www.w3.org/2001/XMLSchema#boolean";
    pub const DECIMAL: &str = "http://www.w3.org/2001/XMLSchema#decimal";
    pub const INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";
    pub const DOUBLE: &str = "http://www.w3.org/2001/XMLSchema#double";
    pub const DATE: &str = "http://www.w3.org/2001/XMLSchema#date";

    const NUMERIC: &[&str] = &[
        "decimal",
        "integer",
        "double",
        "float",
        "int",
        "long",
        "short",
        "byte",
        "nonNegativeInteger",
        "positiveInteger",
        "nonPositiveInteger",
        "negativeInteger",
        "unsignedInt",
        "unsignedLong",
        "unsignedShort",
        "unsignedByte",
    ];

    pub fn is_numeric(datatype: &str) -> bool {
        datatype
            .strip_prefix(NS)
            .is_some_and(|local| NUMERIC.contains(&local))
    }
}

pub mod skos {
    pub const NS: &str = "http://www.w3.org/2004/02/skos/core#";
    pub const CONCEPT: &str = "http://www.w3.org/2004/02/skos/core#Concept";
    pub const CONCEPT_SCHEME: &str = "http://www.w3.org/2004/02/skos/core#ConceptScheme";
    pub const PREF_LABEL: &str = "http://www.w3.org/2004/02/skos/core#prefLabel";
    pub const ALT_LABEL: &str = "http://www.w3.org/2004/02/skos/core#altLabel";
    pub const HIDDEN_LABEL: &str = "http://www.w3.org/2004/02/skos/core#hiddenLabel";
    pub const BROADER: &str = "http://www.w3.org/2004/02/skos/core#broader";
    pub const NARROWER: &str = "http://www.w3.org/2004/02/skos/core#narrower";
    pub const IN_SCHEME: &str = "http://www.w3.org/2004/02/skos/core#inScheme";
    pub const TOP_CONCEPT_OF: &str = "http://www.w3.org/2004/02/skos/core#topConceptOf";
    pub const HAS_TOP_CONCEPT: &str = "http://www.w3.org/2004/02/skos/core#hasTopConcept";
    pub const NOTATION: &str = "http://www.w3.org/2004/02/skos/core#notation";
}

pub mod skosxl {
    pub const NS: &str = "http://www.w3.org/2008/05/skos-xl#";
    pub const LABEL: &str = "http://www.w3.org/2008/05/skos-xl#Label";
    pub const PREF_LABEL: &str = "http://www.w3.org/2008/05/skos-xl#prefLabel";
    pub const ALT_LABEL: &str = "http://www.w3.org/2008/05/skos-xl#altLabel";
    pub const HIDDEN_LABEL: &str = "http://www.w3.org/2008/05/skos-xl#hiddenLabel";
    pub const LITERAL_FORM: &str = "http://www.w3.org/2008/05/skos-xl#literalForm";
}

pub mod dcterms {
    pub const NS: &str = "http://purl.org/dc/terms/";
    pub const TITLE: &str = "http://purl.org/dc/terms/title";
}

pub mod sh {
    pub const NS: &str = "http://www.w3.org/ns/shacl#";
    pub const NODE_SHAPE: &str = "http://www.w3.org/ns/shacl#NodeShape";
    pub const PROPERTY_SHAPE: &str = "http://www.w3.org/ns/shacl#PropertyShape";
    pub const TARGET_CLASS: &str = "http://www.w3.org/ns/shacl#targetClass";
    pub const PROPERTY: &str = "http://www.w3.org/ns/shacl#property";
    pub const PATH: &str = "http://www.w3.org/ns/shacl#path";
    pub const MIN_COUNT: &str = "http://www.w3.org/ns/shacl#minCount";
    pub const MAX_COUNT: &str = "http://www.w3.org/ns/shacl#maxCount";
    pub const CLASS: &str = "http://www.w3.org/ns/shacl#class";
    pub const DATATYPE: &str = "http://www.w3.org/ns/shacl#datatype";
    pub const NODE_KIND: &str = "http://www.w3.org/ns/shacl#nodeKind";
    pub const IN: &str = "http://www.w3.org/ns/shacl#in";
    pub const HAS_VALUE: &str = "http://www.w3.org/ns/shacl#hasValue";
    pub const NODE: &str = "http://www.w3.org/ns/shacl#node";
    pub const OR: &str = "http://www.w3.org/ns/shacl#or";
    pub const LANGUAGE_IN: &str = "http://www.w3.org/ns/shacl#languageIn";
    pub const UNIQUE_LANG: &str = "http://www.w3.org/ns/shacl#uniqueLang";
    pub const CLOSED: &str = "http://www.w3.org/ns/shacl#closed";
    pub const IGNORED_PROPERTIES: &str = "http://www.w3.org/ns/shacl#ignoredProperties";
    pub const SEVERITY: &str = "http://www.w3.org/ns/shacl#severity";
    pub const IRI: &str = "http://www.w3.org/ns/shacl#IRI";
    pub const LITERAL: &str = "http://www.w3.org/ns/shacl#Literal";
    pub const BLANK_NODE: &str = "http://www.w3.org/ns/shacl#BlankNode";
    pub const BLANK_NODE_OR_IRI: &str = "http://www.w3.org/ns/shacl#BlankNodeOrIRI";
    pub const BLANK_NODE_OR_LITERAL: &str = "http://www.w3.org/ns/shacl#BlankNodeOrLiteral";
    pub const IRI_OR_LITERAL: &str = "http://www.w3.org/ns/shacl#IRIOrLiteral";
    pub const VIOLATION: &str = "http://www.w3.org/ns/shacl#Violation";
    pub const WARNING: &str = "http://www.w3.org/ns/shacl#Warning";
    pub const NAME: &str = "http://www.w3.org/ns/shacl#name";
    pub const DESCRIPTION: &str = "http://www.w3.org/ns/shacl#description";
    pub const MESSAGE: &str = "http://www.w3.org/ns/shacl#message";
    pub const ORDER: &str = "http://www.w3.org/ns/shacl#order";
    pub const GROUP: &str = "http://www.w3.org/ns/shacl#group";
    pub const DEACTIVATED: &str = "http://www.w3.org/ns/shacl#deactivated";
}

/// Document components vocabulary (containers, markers).
pub mod doc {
    pub const NS: &str = "https://w3id.org/dpg/doc#";
    pub const DOCUMENT: &str = "https://w3id.org/dpg/doc#Document";
    pub const CONTAINER: &str = "https://w3id.org/dpg/doc#Container";
    pub const MARKER_CONCEPT: &str = "https://w3id.org/dpg/doc#MarkerConcept";
    pub const HAS_CONTAINER: &str = "https://w3id.org/dpg/doc#hasContainer";
    pub const HAS_MARKER: &str = "https://w3id.org/dpg/doc#hasMarker";
    pub const HAS_CONTENT: &str = "https://w3id.org/dpg/doc#hasContent";
    pub const ORDER: &str = "https://w3id.org/dpg/doc#order";
    pub const HEADING_TEXT: &str = "https://w3id.org/dpg/doc#headingText";
    pub const TITLE: &str = "https://w3id.org/dpg/doc#title";
    pub const CONFORMS_TO: &str = "https://w3id.org/dpg/doc#conformsTo";
}

/// Safety data vocabulary (compounds, classifications, ingredients).
pub mod safed {
    pub const NS: &str = "https://w3id.org/dpg/safed#";
    pub const SAFETY_DATA_SHEET: &str = "https://w3id.org/dpg/safed#SafetyDataSheet";
    pub const COMPOUND: &str = "https://w3id.org/dpg/safed#Compound";
    pub const MIXTURE: &str = "https://w3id.org/dpg/safed#Mixture";
    pub const INGREDIENT: &str = "https://w3id.org/dpg/safed#Ingredient";
    pub const CLASSIFICATION: &str = "https://w3id.org/dpg/safed#Classification";
    pub const HAZARD_STATEMENT_ENTRY: &str = "https://w3id.org/dpg/safed#HazardStatementEntry";
    pub const PRECAUTIONARY_STATEMENT_ENTRY: &str =
        "https://w3id.org/dpg/safed#PrecautionaryStatementEntry";
    pub const DESCRIBES: &str = "https://w3id.org/dpg/safed#describes";
    pub const COMPOUND_NAME: &str = "https://w3id.org/dpg/safed#compoundName";
    pub const CAS_NUMBER: &str = "https://w3id.org/dpg/safed#casNumber";
    pub const MANUFACTURER: &str = "https://w3id.org/dpg/safed#manufacturer";
    pub const LANGUAGE: &str = "https://w3id.org/dpg/safed#language";
    pub const REVISION_DATE: &str = "https://w3id.org/dpg/safed#revisionDate";
    pub const CLASSIFICATION_PROP: &str = "https://w3id.org/dpg/safed#classification";
    pub const CLASSIFICATION_CONCEPT: &str = "https://w3id.org/dpg/safed#classificationConcept";
    pub const LABEL_DISPLAY: &str = "https://w3id.org/dpg/safed#labelDisplay";
    pub const HAZARD_STATEMENT: &str = "https://w3id.org/dpg/safed#hazardStatement";
    pub const PRECAUTIONARY_STATEMENT: &str = "https://w3id.org/dpg/safed#precautionaryStatement";
    pub const STATEMENT_TEXT: &str = "https://w3id.org/dpg/safed#statementText";
    pub const H_CODE: &str = "https://w3id.org/dpg/safed#hCode";
    pub const P_CODE: &str = "https://w3id.org/dpg/safed#pCode";
    pub const SECTION: &str = "https://w3id.org/dpg/safed#section";
    pub const PICTOGRAM: &str = "https://w3id.org/dpg/safed#pictogram";
    pub const HAS_INGREDIENT: &str = "https://w3id.org/dpg/safed#hasIngredient";
    pub const SUBSTANCE: &str = "https://w3id.org/dpg/safed#substance";
    pub const INGREDIENT_NAME: &str = "https://w3id.org/dpg/safed#ingredientName";
    pub const CONCENTRATION: &str = "https://w3id.org/dpg/safed#concentration";
}

/// GHS taxonomy namespace.
pub mod ghs {
    pub const NS: &str = "https://w3id.org/dpg/ghs-rev10#";
    pub const SDS_SECTION_HEADING: &str = "https://w3id.org/dpg/ghs-rev10#SdsSectionHeading";
    pub const SDS_FORMAT: &str = "https://w3id.org/dpg/ghs-rev10#SdsFormat";
    pub const HAZARD_PICTOGRAMS: &str = "https://w3id.org/dpg/ghs-rev10#HazardPictograms";
    pub const EYE_IRRIT_CAT_2A: &str = "https://w3id.org/dpg/ghs-rev10#EyeIrritCat2A";

    /// Pictogram concept IRI for a code such as `GHS07`.
    pub fn pictogram(code: &str) -> String {
        format!("{NS}{code}")
    }
}

/// Namespace under which SDS instance IRIs are minted.
pub const SDS_INSTANCE_NS: &str = "https://w3id.org/dpg/sds/";

/// Prefix map attached to graphs produced by this crate.
pub fn standard_prefixes() -> Vec<(&'static str, &'static str)> {
    vec![
        ("rdf", rdf::NS),
        ("rdfs", rdfs::NS),
        ("xsd", xsd::NS),
        ("skos", skos::NS),
        ("skosxl", skosxl::NS),
        ("dcterms", dcterms::NS),
        ("sh", sh::NS),
        ("doc", doc::NS),
        ("safed", safed::NS),
        ("ghs", ghs::NS),
        ("sds", SDS_INSTANCE_NS),
    ]
}
