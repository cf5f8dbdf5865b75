__version__ = '0.1.0'

GRAVITY = 9.81


# SIGNALS AND SENDERS (PyDispatch)

STRIDER_END_TICK_EVENT = 'strider::end_tick'
STRIDER_STEP_EVENT = 'strider::step'
STRIDER_END_EPISODE_EVENT = 'strider::end_episode'
