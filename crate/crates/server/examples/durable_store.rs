//! The write-ahead-logged record store on its own.

use ideaforge::store::{Op, Store, StoreError};
use serde_json::json;

fn main() -> Result<(), StoreError> {
    let dir = tempfile::tempdir()?;
    {
        let mut store = Store::open(dir.path())?;
        store.commit(vec![
            Op::Put { kind: "note".into(), id: "1".into(), expected: 0, payload: json!({"text": "first"}) },
            Op::Put { kind: "note".into(), id: "2".into(), expected: 0, payload: json!({"text": "second"}) },
        ])?;
        store.commit(vec![Op::Put { kind: "note".into(), id: "1".into(), expected: 1, payload: json!({"text": "edited"}) }])?;

        let stale = store.commit(vec![Op::Delete { kind: "note".into(), id: "1".into(), expected: 1 }]);
        println!("stale delete: {}", stale.unwrap_err());

        match Store::open(dir.path()) {
            Err(e) => println!("second writer: {e}"),
            Ok(_) => println!("second writer unexpectedly opened the store"),
        }
        store.checkpoint()?;
        store.commit(vec![Op::Delete { kind: "note".into(), id: "2".into(), expected: 1 }])?;
    }

    let reopened = Store::open(dir.path())?;
    println!("after reopen, seq {}:", reopened.seq());
    print!("{}", reopened.export());
    Ok(())
}
