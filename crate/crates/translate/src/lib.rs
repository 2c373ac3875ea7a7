//! Translation of real-time Creol classes into timed automata: one
//! automaton per method, a scheduler automaton per object, and the
//! composition with behavioral interfaces of the environment.

pub mod abs;
pub mod bounds;
pub mod class;
pub mod error;
pub mod interface;
pub mod method;
pub mod scheduler;
pub mod system;

pub use abs::{abstract_guard, label_reset, AbstractionPolicy, Domain};
pub use bounds::{extract_timing_bounds, queue_bound, TimingBounds};
pub use class::{
    gen_declarations, translate_class, ClassTranslation, DeadlineRange, LocMap, TaskInfo, TaskTable,
};
pub use error::TranslateError;
pub use interface::{load_interface, BehavioralInterface, InterfaceError};
pub use method::{translate_method, Enabler, MethodTranslation};
pub use scheduler::{build_scheduler, Role, SchedulerConfig, SchedulerTemplate, Strategy};
pub use system::{build_system, golden_text, ComposedSystem, InterfaceSpec, SystemSpec};
