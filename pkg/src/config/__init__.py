from config.settings import get_settings
