from .configuration_service import ConfigurationService
from .file_service import FileService, format_cell
from .notification_service import NotificationService, NotificationManager
