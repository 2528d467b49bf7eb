use std::collections::{BTreeMap, HashMap, HashSet};

use chrono::{DateTime, NaiveDate, NaiveTime, Utc};

use super::config::{ActivityRule, ChangeDocumentRule, ExtractionConfig, Filter, MissingTime, TableRules, TimestampRule};
use super::{assemble_log, object_id, AttributeMap, Event, ObjectCentricLog, ObjectInstance, OcelError};
use crate::identify::TableSelection;
use crate::ingest::{Catalog, ClassRegistry, Domain, IngestError, Row, RowDataset, TableDefinition};
use crate::timefmt;

#[derive(Debug, Clone)]
enum Predicate {
    Eq(String, String),
    Ne(String, String),
    In(String, HashSet<String>),
    DateRange(String, NaiveDate, NaiveDate),
}

impl Predicate {
    fn accepts(&self, row: &Row) -> bool {
        let cell = |c: &str| row.get(c).unwrap_or_default();
        match self {
            Predicate::Eq(c, v) => cell(c) == v,
            Predicate::Ne(c, v) => cell(c) != v,
            Predicate::In(c, vs) => vs.contains(cell(c)),
            Predicate::DateRange(c, from, to) => {
                timefmt::parse_date(cell(c)).is_some_and(|d| *from <= d && d <= *to)
            }
        }
    }
}

/// An order-preserving, streaming view of the rows passing all filters.
#[derive(Debug, Clone)]
pub struct FilteredView {
    dataset: RowDataset,
    predicates: Vec<Predicate>,
}

impl FilteredView {
    pub fn new(dataset: RowDataset, table: &TableDefinition, filters: &[Filter]) -> Result<Self, OcelError> {
        let predicates = filters
            .iter()
            .map(|f| {
                let column = table.column(f.column()).ok_or_else(|| OcelError::UnknownFilterColumn {
                    table: table.name.clone(),
                    column: f.column().to_string(),
                })?;
                Ok(match f {
                    Filter::Eq { column, value } => Predicate::Eq(column.clone(), value.clone()),
                    Filter::Ne { column, value } => Predicate::Ne(column.clone(), value.clone()),
                    Filter::In { column, values } => Predicate::In(column.clone(), values.iter().cloned().collect()),
                    Filter::DateRange { from, to, .. } => {
                        let mismatch = |message: &str| OcelError::TypeMismatch {
                            table: table.name.clone(),
                            column: column.name.clone(),
                            message: message.to_string(),
                        };
                        if column.domain != Domain::Date {
                            return Err(mismatch("date_range needs a date column"));
                        }
                        let from = timefmt::parse_date(from).ok_or_else(|| mismatch("unparsable lower bound"))?;
                        let to = timefmt::parse_date(to).ok_or_else(|| mismatch("unparsable upper bound"))?;
                        Predicate::DateRange(column.name.clone(), from, to)
                    }
                })
            })
            .collect::<Result<_, OcelError>>()?;
        Ok(FilteredView { dataset, predicates })
    }

    pub fn unfiltered(dataset: RowDataset) -> Self {
        FilteredView {
            dataset,
            predicates: Vec::new(),
        }
    }

    pub fn table(&self) -> &str {
        self.dataset.table()
    }

    pub fn rows(&self) -> impl Iterator<Item = Result<Row, IngestError>> + '_ {
        self.dataset
            .rows()
            .filter(move |r| r.as_ref().map_or(true, |row| self.predicates.iter().all(|p| p.accepts(row))))
    }

    /// Number of rows passing the filters; one full pass.
    pub fn count(&self) -> Result<usize, OcelError> {
        let mut n = 0;
        for row in self.rows() {
            row?;
            n += 1;
        }
        Ok(n)
    }
}

/// Filtered views for every configured table of the selection.
pub fn preprocess(
    selection: &TableSelection,
    config: &ExtractionConfig,
    catalog: &Catalog,
    datasets: &BTreeMap<String, RowDataset>,
) -> Result<BTreeMap<String, FilteredView>, OcelError> {
    let included: HashSet<&str> = selection.included_tables().collect();
    let mut views = BTreeMap::new();
    for (name, rules) in &config.tables {
        if !included.contains(name.as_str()) {
            return Err(OcelError::TableNotSelected(name.clone()));
        }
        let table = catalog.get(name).ok_or_else(|| OcelError::UnknownTable(name.clone()))?;
        let dataset = datasets.get(name).ok_or_else(|| OcelError::MissingDataset(name.clone()))?;
        views.insert(name.clone(), FilteredView::new(dataset.clone(), table, &rules.filters)?);
    }
    Ok(views)
}

/// Events and objects produced by one table.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TableOutput {
    pub events: Vec<Event>,
    pub objects: Vec<ObjectInstance>,
}

fn row_timestamp(
    row: &Row,
    rule: &TimestampRule,
    missing_time: MissingTime,
    table: &str,
    number: usize,
) -> Result<DateTime<Utc>, OcelError> {
    let bad = || OcelError::UnparsableTimestamp {
        table: table.to_string(),
        row: number,
    };
    let date = row.get(&rule.date).and_then(timefmt::parse_date).ok_or_else(bad)?;
    let time = match &rule.time {
        None => NaiveTime::MIN,
        Some(column) => match (row.get(column), missing_time) {
            (None, MissingTime::Midnight) => NaiveTime::MIN,
            (None, MissingTime::Error) => return Err(bad()),
            (Some(text), _) => timefmt::parse_time(text).ok_or_else(bad)?,
        },
    };
    Ok(date.and_time(time).and_utc())
}

fn attributes(row: &Row, columns: &[String]) -> AttributeMap {
    columns
        .iter()
        .filter_map(|c| row.get(c).map(|v| (c.clone(), v.to_string())))
        .collect()
}

fn key_id(table: &TableDefinition, row: &Row) -> String {
    let values: Vec<&str> = table.key_columns.iter().map(|k| row.get(k).unwrap_or_default()).collect();
    format!("{}:{}", table.name, values.join("/"))
}

/// Objects identified by `row` under the table's object rules.
fn row_objects(table: &str, rules: &TableRules, row: &Row) -> Result<Vec<ObjectInstance>, OcelError> {
    let mut out = Vec::with_capacity(rules.objects.len());
    for rule in &rules.objects {
        let values: Option<Vec<&str>> = rule.key.iter().map(|k| row.get(k)).collect();
        match values {
            Some(values) => out.push(ObjectInstance {
                id: object_id(&rule.object_type, &values),
                object_type: rule.object_type.clone(),
                ovmap: attributes(row, &rule.attributes),
            }),
            None if rule.optional => {}
            None => {
                return Err(OcelError::MissingObjectKey {
                    table: table.to_string(),
                    row: row.number(),
                    object_type: rule.object_type.clone(),
                })
            }
        }
    }
    Ok(out)
}

fn no_objects(table: &str, rules: &TableRules, row: &Row) -> OcelError {
    OcelError::MissingObjectKey {
        table: table.to_string(),
        row: row.number(),
        object_type: rules.objects.first().map(|r| r.object_type.clone()).unwrap_or_default(),
    }
}

/// One event per row of `view` (none for objects-only tables), plus every
/// object the rows identify.
pub fn extract_table_events(
    view: &FilteredView,
    table: &TableDefinition,
    rules: &TableRules,
    missing_time: MissingTime,
) -> Result<TableOutput, OcelError> {
    let mut out = TableOutput::default();
    for row in view.rows() {
        let row = row?;
        let objects = row_objects(&table.name, rules, &row)?;
        if !rules.objects_only {
            let activity = match &rules.activity {
                Some(ActivityRule::Static(label)) => label.clone(),
                Some(ActivityRule::Template(t)) => t.render(|c| row.get(c).map(str::to_string)),
                Some(ActivityRule::ChangeDocuments(_)) | None => return Err(OcelError::MissingRules(table.name.clone())),
            };
            let timestamp_rule = rules.timestamp.as_ref().ok_or_else(|| OcelError::MissingRules(table.name.clone()))?;
            if objects.is_empty() {
                return Err(no_objects(&table.name, rules, &row));
            }
            out.events.push(Event {
                id: key_id(table, &row),
                activity,
                timestamp: row_timestamp(&row, timestamp_rule, missing_time, &table.name, row.number())?,
                omap: objects.iter().map(|o| o.id.clone()).collect(),
                vmap: attributes(&row, &rules.attributes),
            });
        }
        out.objects.extend(objects);
    }
    Ok(out)
}

struct HeaderInfo {
    timestamp: DateTime<Utc>,
    object: ObjectInstance,
}

/// One `"Change <field>"` event per item row of `items`, joined to its header
/// row in `header` on the pairing keys. Each event references the business
/// object named by the header, resolved through the class registry.
#[allow(clippy::too_many_arguments)]
pub fn extract_change_events(
    header: &FilteredView,
    header_table: &TableDefinition,
    items: &FilteredView,
    item_table: &TableDefinition,
    rule: &ChangeDocumentRule,
    rules: &TableRules,
    classes: &ClassRegistry,
    missing_time: MissingTime,
) -> Result<TableOutput, OcelError> {
    let timestamp_rule = rules
        .timestamp
        .as_ref()
        .ok_or_else(|| OcelError::MissingRules(item_table.name.clone()))?;
    let pairing = |row: &Row| -> Vec<String> {
        rule.pairing_keys
            .iter()
            .map(|k| row.get(k).unwrap_or_default().to_string())
            .collect()
    };
    let mut headers: HashMap<Vec<String>, HeaderInfo> = HashMap::new();
    for row in header.rows() {
        let row = row?;
        let class = row.get(&rule.object_class_column).unwrap_or_default();
        if classes.get(class).is_none() {
            return Err(OcelError::UnknownObjectClass(class.to_string()));
        }
        let object_type = rule
            .object_types
            .get(class)
            .ok_or_else(|| OcelError::UnknownObjectClass(class.to_string()))?;
        let object_key = row.get(&rule.object_id_column).ok_or_else(|| OcelError::MissingObjectKey {
            table: header_table.name.clone(),
            row: row.number(),
            object_type: object_type.clone(),
        })?;
        let info = HeaderInfo {
            timestamp: row_timestamp(&row, timestamp_rule, missing_time, &header_table.name, row.number())?,
            object: ObjectInstance::new(object_type, &[object_key]),
        };
        headers.entry(pairing(&row)).or_insert(info);
    }

    let mut out = TableOutput::default();
    for row in items.rows() {
        let row = row?;
        let id = key_id(item_table, &row);
        let Some(info) = headers.get(&pairing(&row)) else {
            return Err(OcelError::OrphanItem(id));
        };
        let mut objects = row_objects(&item_table.name, rules, &row)?;
        objects.push(info.object.clone());
        out.events.push(Event {
            id,
            activity: format!("Change {}", row.get(&rule.field_column).unwrap_or_default()),
            timestamp: info.timestamp,
            omap: objects.iter().map(|o| o.id.clone()).collect(),
            vmap: attributes(&row, &rules.attributes),
        });
        out.objects.extend(objects);
    }
    Ok(out)
}

/// Validates `config`, filters the datasets and extracts every configured
/// table into one log. `progress` receives `(tables done, tables total)`
/// after each table.
pub fn extract_log(
    selection: &TableSelection,
    config: &ExtractionConfig,
    catalog: &Catalog,
    classes: &ClassRegistry,
    datasets: &BTreeMap<String, RowDataset>,
    mut progress: impl FnMut(usize, usize),
) -> Result<ObjectCentricLog, OcelError> {
    config.validate(selection, catalog, classes)?;
    let views = preprocess(selection, config, catalog, datasets)?;
    let total = config.tables.len();
    progress(0, total);
    let mut outputs = Vec::with_capacity(total);
    for (done, (name, rules)) in config.tables.iter().enumerate() {
        let table = catalog.require(name)?;
        let output = match &rules.activity {
            Some(ActivityRule::ChangeDocuments(rule)) => extract_change_events(
                &views[&rule.header_table],
                catalog.require(&rule.header_table)?,
                &views[name],
                table,
                rule,
                rules,
                classes,
                config.missing_time,
            )?,
            _ => extract_table_events(&views[name], table, rules, config.missing_time)?,
        };
        outputs.push(output);
        progress(done + 1, total);
    }
    let (events, objects): (Vec<_>, Vec<_>) = outputs.into_iter().map(|o| (o.events, o.objects)).unzip();
    assemble_log(events, objects)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{load_row_data, parse_document_classes, parse_table_catalog, Format, RowOptions};
    use crate::ocel::ObjectRule;

    const CATALOG: &str = "name,description,columns,key_columns\n\
        EKKO,PO,EBELN:document-number|BSART:code|AEDAT:date|UZEIT:time:nullable,EBELN\n\
        CDHDR,Changes,OBJECTCLAS:code|OBJECTID:document-number|CHANGENR:document-number|UDATE:date|UTIME:time,OBJECTCLAS|OBJECTID|CHANGENR\n\
        CDPOS,Change items,OBJECTCLAS:code|OBJECTID:document-number|CHANGENR:document-number|FNAME:code|VALUE_NEW:text:nullable,OBJECTCLAS|OBJECTID|CHANGENR|FNAME\n";

    fn catalog() -> Catalog {
        Catalog::new(parse_table_catalog(CATALOG.as_bytes(), Format::Csv).unwrap()).unwrap()
    }

    fn classes() -> ClassRegistry {
        let cat = catalog();
        let records = parse_document_classes(
            "class_id,label,member_tables,change_tracked\npurchase_orders,PO,EKKO,true\n__change_documents__,CD,CDHDR|CDPOS,false\n"
                .as_bytes(),
            Format::Csv,
            &cat,
        )
        .unwrap();
        ClassRegistry::new(records, &cat).unwrap()
    }

    fn view(table: &str, body: &str, filters: &[Filter]) -> FilteredView {
        let cat = catalog();
        let def = cat.get(table).unwrap();
        let ds = load_row_data(def, body.as_bytes().to_vec().into(), RowOptions::default()).unwrap();
        FilteredView::new(ds, def, filters).unwrap()
    }

    const EKKO_ROWS: &str = "EBELN,BSART,AEDAT,UZEIT\n\
        4500000001,NB,20210107,184854\n4500000002,NB,20201020,\n4500000003,FO,20210301,080000\n";

    fn ekko_rules() -> TableRules {
        TableRules {
            activity: Some(ActivityRule::Static("Create Purchase Order".into())),
            timestamp: Some(TimestampRule {
                date: "AEDAT".into(),
                time: Some("UZEIT".into()),
            }),
            objects: vec![ObjectRule {
                object_type: "purchase_order".into(),
                key: vec!["EBELN".into()],
                attributes: vec!["BSART".into()],
                optional: false,
            }],
            ..TableRules::default()
        }
    }

    #[test]
    fn filters() {
        let range = Filter::DateRange {
            column: "AEDAT".into(),
            from: "2021-01-01".into(),
            to: "2021-12-31".into(),
        };
        assert_eq!(view("EKKO", EKKO_ROWS, &[range]).count().unwrap(), 2);
        assert_eq!(view("EKKO", EKKO_ROWS, &[]).count().unwrap(), 3);
        let ne = Filter::Ne {
            column: "BSART".into(),
            value: "NB".into(),
        };
        assert_eq!(view("EKKO", EKKO_ROWS, &[ne]).count().unwrap(), 1);
        let blank = Filter::Ne {
            column: "UZEIT".into(),
            value: String::new(),
        };
        assert_eq!(view("EKKO", EKKO_ROWS, &[blank]).count().unwrap(), 2);

        let cat = catalog();
        let def = cat.get("EKKO").unwrap();
        let ds = load_row_data(def, EKKO_ROWS.as_bytes().to_vec().into(), RowOptions::default()).unwrap();
        let missing = Filter::Eq {
            column: "LIFNR".into(),
            value: "1".into(),
        };
        assert!(matches!(
            FilteredView::new(ds.clone(), def, &[missing]),
            Err(OcelError::UnknownFilterColumn { .. })
        ));
        let typed = Filter::DateRange {
            column: "BSART".into(),
            from: "2021-01-01".into(),
            to: "2021-12-31".into(),
        };
        assert!(matches!(FilteredView::new(ds, def, &[typed]), Err(OcelError::TypeMismatch { .. })));
    }

    #[test]
    fn table_events() {
        let cat = catalog();
        let out = extract_table_events(&view("EKKO", EKKO_ROWS, &[]), cat.get("EKKO").unwrap(), &ekko_rules(), MissingTime::Midnight)
            .unwrap();
        assert_eq!(out.events.len(), 3);
        assert_eq!(out.events[0].id, "EKKO:4500000001");
        assert_eq!(out.events[0].omap, ["purchase_order:4500000001"]);
        assert_eq!(timefmt::format_instant(&out.events[0].timestamp), "2021-01-07T18:48:54Z");
        assert_eq!(timefmt::format_instant(&out.events[1].timestamp), "2020-10-20T00:00:00Z");
        assert_eq!(out.objects[2].ovmap["BSART"], "FO");

        let strict = extract_table_events(&view("EKKO", EKKO_ROWS, &[]), cat.get("EKKO").unwrap(), &ekko_rules(), MissingTime::Error);
        assert_eq!(
            strict,
            Err(OcelError::UnparsableTimestamp {
                table: "EKKO".into(),
                row: 2
            })
        );
        let empty = view("EKKO", "EBELN,BSART,AEDAT,UZEIT\n", &[]);
        assert!(extract_table_events(&empty, cat.get("EKKO").unwrap(), &ekko_rules(), MissingTime::Midnight)
            .unwrap()
            .events
            .is_empty());
        let no_date = view("EKKO", "EBELN,BSART,AEDAT,UZEIT\n4500000009,NB,,\n", &[]);
        assert!(matches!(
            extract_table_events(&no_date, cat.get("EKKO").unwrap(), &ekko_rules(), MissingTime::Midnight),
            Err(OcelError::UnparsableTimestamp { row: 1, .. })
        ));
    }

    fn change_rule() -> (ChangeDocumentRule, TableRules) {
        let rule = ChangeDocumentRule {
            header_table: "CDHDR".into(),
            pairing_keys: vec!["OBJECTCLAS".into(), "OBJECTID".into(), "CHANGENR".into()],
            field_column: "FNAME".into(),
            object_class_column: "OBJECTCLAS".into(),
            object_id_column: "OBJECTID".into(),
            object_types: BTreeMap::from([("purchase_orders".into(), "purchase_order".into())]),
        };
        let rules = TableRules {
            activity: Some(ActivityRule::ChangeDocuments(rule.clone())),
            timestamp: Some(TimestampRule {
                date: "UDATE".into(),
                time: Some("UTIME".into()),
            }),
            attributes: vec!["VALUE_NEW".into()],
            ..TableRules::default()
        };
        (rule, rules)
    }

    #[test]
    fn change_events() {
        let cat = catalog();
        let (rule, rules) = change_rule();
        let header = view(
            "CDHDR",
            "OBJECTCLAS,OBJECTID,CHANGENR,UDATE,UTIME\npurchase_orders,4500000001,0000000001,20210117,132650\n",
            &[],
        );
        let items = view(
            "CDPOS",
            "OBJECTCLAS,OBJECTID,CHANGENR,FNAME,VALUE_NEW\n\
             purchase_orders,4500000001,0000000001,NETPR,124.53\npurchase_orders,4500000001,0000000001,MENGE,53\n",
            &[],
        );
        let run = |items: &FilteredView| {
            extract_change_events(
                &header,
                cat.get("CDHDR").unwrap(),
                items,
                cat.get("CDPOS").unwrap(),
                &rule,
                &rules,
                &classes(),
                MissingTime::Midnight,
            )
        };
        let out = run(&items).unwrap();
        let activities: Vec<&str> = out.events.iter().map(|e| e.activity.as_str()).collect();
        assert_eq!(activities, ["Change NETPR", "Change MENGE"]);
        assert!(out.events.iter().all(|e| e.omap == ["purchase_order:4500000001"]));
        assert_eq!(timefmt::format_instant(&out.events[1].timestamp), "2021-01-17T13:26:50Z");

        let orphan = view(
            "CDPOS",
            "OBJECTCLAS,OBJECTID,CHANGENR,FNAME,VALUE_NEW\npurchase_orders,4500000001,0000000002,NETPR,1\n",
            &[],
        );
        assert_eq!(
            run(&orphan),
            Err(OcelError::OrphanItem("CDPOS:purchase_orders/4500000001/0000000002/NETPR".into()))
        );
        let empty = view("CDPOS", "OBJECTCLAS,OBJECTID,CHANGENR,FNAME,VALUE_NEW\n", &[]);
        assert!(run(&empty).unwrap().events.is_empty());

        let foreign = view(
            "CDHDR",
            "OBJECTCLAS,OBJECTID,CHANGENR,UDATE,UTIME\nsales_orders,1,1,20210117,132650\n",
            &[],
        );
        assert_eq!(
            extract_change_events(
                &foreign,
                cat.get("CDHDR").unwrap(),
                &empty,
                cat.get("CDPOS").unwrap(),
                &rule,
                &rules,
                &classes(),
                MissingTime::Midnight
            ),
            Err(OcelError::UnknownObjectClass("sales_orders".into()))
        );
    }
}
